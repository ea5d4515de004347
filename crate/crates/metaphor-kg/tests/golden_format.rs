//! Golden-file test for the graph serialization format: the expected
//! body is written out by hand and the header digest is computed over
//! those hand-written bytes, independent of the encoder.

use sha2::{Digest, Sha256};

use metaphor_kg::{build_graph, read_graph, write_graph, BuildOptions, ConceptPair};

#[test]
fn serialized_file_matches_hand_written_golden() {
    let built = build_graph(
        &[
            ConceptPair::new("Time", "river", "d1"),
            ConceptPair::new("old age", "sunset", "d1"),
            ConceptPair::new("time", "river", "d2"),
        ],
        &BuildOptions::default(),
    )
    .unwrap();

    // Sorted labels: "old age" < "river" < "sunset" < "time".
    // Mapping edges: {river,time} weight 2, {old age,sunset} weight 1.
    // Doc d1 holds {old age, river, sunset, time}: four cooccur pairs
    // fill in around the existing mapping edges.
    let body = concat!(
        "N 0 1 1 old\\sage\n",
        "N 1 2 2 river\n",
        "N 2 1 2 sunset\n",
        "N 3 2 1 time\n",
        "E 0 1 c 1\n",
        "E 0 2 m 1\n",
        "E 0 3 c 1\n",
        "E 1 2 c 1\n",
        "E 1 3 m 2\n",
        "E 2 3 c 1\n",
    );
    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    let expected = format!("MKG1 4 6 {digest}\n{body}");

    assert_eq!(write_graph(&built.graph), expected);

    let loaded = read_graph(&expected).unwrap();
    assert_eq!(loaded.meta().digest, digest);
    assert_eq!(write_graph(&loaded), expected);
}
