"""Smoke test for the `voronoi` extension module.

Build and place the module next to this script first:

    cargo build -p voronoi-py --release --features extension-module
    cp target/release/libvoronoi_py.so python/voronoi.so
"""

import sys

import voronoi

A2 = [[2, -1], [-1, 2]]


def main():
    md = voronoi.min_data(A2)
    assert md["min"] == {"num": 2, "den": 1}, md
    assert len(md["vectors"]) == 3

    assert voronoi.is_perfect(A2)
    assert not voronoi.is_perfect([[1, 0], [0, 1]])

    u = voronoi.equivalent(A2, [[2, 1], [1, 2]])
    assert u is not None and abs(u[0][0] * u[1][1] - u[0][1] * u[1][0]) == 1
    assert voronoi.equivalent(A2, [[1, 0], [0, 1]]) is None

    assert voronoi.automorphisms(A2)["order"] == 12

    d = voronoi.domain(A2)
    assert len(d["rays"]) == 3 and len(d["facet_normals"]) == 3
    assert voronoi.equivalent(voronoi.neighbor(A2, 0), A2) is not None

    counts = [len(voronoi.enumerate(g)["classes"]) for g in range(1, 5)]
    assert counts == [1, 1, 1, 2], counts

    red = voronoi.reduce([[1, 0], [0, 1]])
    assert len(red["face"]) == 2

    cert = voronoi.check_interior([[1, 0], [0, 1]])
    assert cert["verdict"] == "PASS" and voronoi.recheck(cert)
    cert = voronoi.check_interior([[1, 0], [0, 0]])
    assert cert["verdict"] == "FAIL" and not cert["asserted"]

    assert voronoi.check_product([[2]], [[2]])["verdict"] == "PASS"
    assert voronoi.check_closure([[1, 0], [0, 1]])["verdict"] == "PASS"
    codim = voronoi.check_codim_one([[2]])
    assert codim["verdict"] == "PASS" and len(codim["witness"]["cones"]) == 9

    certs = voronoi.verify_claims(3)
    assert all(c["verdict"] == "PASS" or not c["asserted"] for c in certs)

    poset = voronoi.strata(2)
    assert len(poset["nodes"]) == 4 and len(poset["edges"]) == 3

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
