use drastic_core::grid::{read_ascii_grid, weighted_sum, write_ascii_grid, Grid, GridHeader};
use proptest::prelude::*;

const NODATA: f64 = -9999.0;

fn arb_grid() -> impl Strategy<Value = Grid> {
    (1usize..6, 1usize..6, -1e6f64..1e6, -1e6f64..1e6, 0.001f64..1000.0).prop_flat_map(
        |(nc, nr, x, y, cs)| {
            let cell = prop_oneof![
                4 => -1e9f64..1e9,
                1 => Just(NODATA),
                1 => (-1000i32..1000).prop_map(f64::from),
            ];
            proptest::collection::vec(cell, nc * nr).prop_map(move |values| {
                let h = GridHeader::new(nc, nr, x, y, cs, NODATA).unwrap();
                Grid::new(h, values).unwrap()
            })
        },
    )
}

fn same_shape_pair() -> impl Strategy<Value = (Grid, Grid)> {
    (1usize..5, 1usize..5).prop_flat_map(|(nc, nr)| {
        let cell = || prop_oneof![5 => -100.0f64..100.0, 1 => Just(NODATA)];
        (
            proptest::collection::vec(cell(), nc * nr),
            proptest::collection::vec(cell(), nc * nr),
        )
            .prop_map(move |(a, b)| {
                let h = GridHeader::new(nc, nr, 0.0, 0.0, 1.0, NODATA).unwrap();
                (Grid::new(h, a).unwrap(), Grid::new(h, b).unwrap())
            })
    })
}

proptest! {
    #[test]
    fn ascii_round_trip_is_bit_identical(g in arb_grid()) {
        let back = read_ascii_grid(&write_ascii_grid(&g)).unwrap();
        prop_assert_eq!(back.header(), g.header());
        let a: Vec<u64> = back.values().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = g.values().iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn map_cells_keeps_header_and_mask(g in arb_grid()) {
        let out = g.map_cells(|x| x * 0.5 + 3.0).unwrap();
        prop_assert_eq!(out.header(), g.header());
        prop_assert_eq!(out.mask(), g.mask());
    }

    #[test]
    fn nodata_absorption((a, b) in same_shape_pair(), wa in 0.1f64..10.0, wb in 0.1f64..10.0) {
        let s = weighted_sum(&[(&a, wa), (&b, wb)]).unwrap();
        for i in 0..s.values().len() {
            let expect_nodata = a.values()[i] == NODATA || b.values()[i] == NODATA;
            prop_assert_eq!(s.values()[i] == NODATA, expect_nodata);
        }
    }

    #[test]
    fn weighted_sum_is_linear((a, b) in same_shape_pair(), wa in 0.1f64..10.0, wb in 0.1f64..10.0, alpha in 0.01f64..100.0) {
        let base = weighted_sum(&[(&a, wa), (&b, wb)]).unwrap();
        let scaled = weighted_sum(&[(&a, alpha * wa), (&b, alpha * wb)]).unwrap();
        for (x, y) in base.values().iter().zip(scaled.values()) {
            if *x == NODATA {
                prop_assert_eq!(*y, NODATA);
            } else {
                prop_assert!((alpha * x - y).abs() <= 1e-9 * (1.0 + y.abs()));
            }
        }
    }
}
