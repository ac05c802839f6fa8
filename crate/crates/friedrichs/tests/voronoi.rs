use friedrichs::voronoi::{bcc_seeds, bcc_voronoi, voronoi_mesh};
use friedrichs_core::mesh::Extent;
use friedrichs_core::{PolyMesh, Vec3};
use proptest::prelude::*;

fn total_volume(m: &PolyMesh) -> f64 {
    m.elements().iter().map(|e| e.volume).sum()
}

#[test]
fn bcc_seed_count() {
    let e = Extent::unit(3);
    assert_eq!(bcc_seeds(1, &e).len(), 9);
    assert_eq!(bcc_seeds(3, &e).len(), 64 + 27);
}

#[test]
fn unjittered_cells_tile_the_box() {
    let e = Extent::new([-0.5; 3], [0.5; 3]);
    let m = bcc_voronoi(2, &e, 0.0, 0).unwrap();
    assert_eq!(m.n_elements(), 27 + 8);
    assert!((total_volume(&m) - 1.0).abs() < 1e-12);
    assert!(m.check_invariants().holds(1e-12));
    // interior lattice cells are truncated octahedra: 8 hexagons + 6 squares
    let centre = m
        .elements()
        .iter()
        .position(|el| el.barycenter.norm() < 1e-12)
        .expect("a cell centred at the origin");
    assert_eq!(m.element(centre).faces.len(), 14);
}

#[test]
fn refinement_halves_the_meshsize() {
    let e = Extent::unit(3);
    let h2 = bcc_voronoi(2, &e, 0.1, 7).unwrap().meshsize();
    let h4 = bcc_voronoi(4, &e, 0.1, 7).unwrap().meshsize();
    assert!((h2 / h4 - 2.0).abs() < 0.3, "{h2} {h4}");
}

#[test]
fn generation_is_deterministic() {
    let e = Extent::unit(3);
    let a = bcc_voronoi(3, &e, 0.1, 11).unwrap();
    let b = bcc_voronoi(3, &e, 0.1, 11).unwrap();
    assert_eq!(a.vertices(), b.vertices());
    assert_eq!(a.n_faces(), b.n_faces());
    let c = bcc_voronoi(3, &e, 0.1, 12).unwrap();
    assert_ne!(a.vertices(), c.vertices());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jittered_meshes_are_valid(n in 1usize..4, jitter in 0.0f64..0.1, seed in any::<u64>()) {
        let e = Extent::unit(3);
        let m = bcc_voronoi(n, &e, jitter, seed).unwrap();
        prop_assert!((total_volume(&m) - 1.0).abs() < 1e-10);
        prop_assert!(m.check_invariants().holds(1e-10));
        for el in m.elements() {
            prop_assert!(el.volume > 0.0);
        }
    }

    #[test]
    fn random_seeds_partition_the_box(
        pts in proptest::collection::vec((0.05f64..0.95, 0.05f64..0.95, 0.05f64..0.95), 2..12)
    ) {
        let seeds: Vec<Vec3> = pts.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect();
        let distinct = seeds.iter().enumerate().all(|(i, a)| seeds[..i].iter().all(|b| a.dist(b) > 1e-2));
        prop_assume!(distinct);
        let m = voronoi_mesh(&seeds, &Extent::unit(3)).unwrap();
        prop_assert_eq!(m.n_elements(), seeds.len());
        prop_assert!((total_volume(&m) - 1.0).abs() < 1e-10);
        // each cell contains its own seed: it is the nearest one to its barycenter
        for (i, el) in m.elements().iter().enumerate() {
            let d = el.barycenter.dist(&seeds[i]);
            prop_assert!(seeds.iter().all(|s| el.barycenter.dist(s) >= d - 1e-12));
        }
    }
}
