"""Command-line interface: output formats, determinism, exit codes."""

import json
import os
import random
import subprocess
import sys

from torq.board import edge_at_centered
from torq.lattice import SignedEdgeSet, edge_shadow, shadow, sv


def run_cli(*args, stdin=None, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "torq.cli", *args],
        input=stdin,
        capture_output=True,
        text=True,
        env=env,
        timeout=300,
    )


class TestCount:
    def test_toroidal_canonical_json(self):
        res = run_cli("count", "--n", "5")
        assert res.returncode == 0
        assert res.stdout == '{"count":10,"mode":"toroidal","n":5,"schema":"torq/1"}\n'

    def test_classical(self):
        res = run_cli("count", "--n", "8", "--mode", "classical")
        assert json.loads(res.stdout)["count"] == 92

    def test_semiqueens(self):
        res = run_cli("count", "--n", "3", "--mode", "semiqueens")
        assert json.loads(res.stdout)["count"] == 3

    def test_bound_env_var(self):
        res = run_cli("count", "--n", "5", "--mode", "classical",
                      env_extra={"TORQ_MAX_EXHAUSTIVE": "4"})
        assert res.returncode == 3
        res = run_cli("count", "--n", "5", "--mode", "classical",
                      env_extra={"TORQ_MAX_EXHAUSTIVE": "5"})
        assert res.returncode == 0


class TestLatticeCheck:
    def test_all_ones_even_board(self):
        res = run_cli("lattice", "check", "--n", "6", "--ones")
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        assert obj["ok"] is False and obj["failed"] == "b"

    def test_stdin_vector_with_oracle(self):
        v = edge_shadow(7, edge_at_centered(7, 1, 2))
        res = run_cli("lattice", "check", "--n", "7", "--oracle",
                      stdin=json.dumps(v.to_json()))
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        assert obj["ok"] is True and obj["oracle_agrees"] is True

    def test_sublattice_mode(self):
        v = sv(7, [])
        res = run_cli("lattice", "check", "--n", "7", "--mode", "sublattice-s",
                      "--oracle", stdin=json.dumps(v.to_json()))
        assert json.loads(res.stdout)["ok"] is True

    def test_malformed_stdin(self):
        res = run_cli("lattice", "check", "--n", "7", stdin="not json")
        assert res.returncode == 2

    def test_n_mismatch(self):
        v = sv(5, [])
        res = run_cli("lattice", "check", "--n", "7", stdin=json.dumps(v.to_json()))
        assert res.returncode == 2


class TestDecompose:
    @staticmethod
    def member(n, edges):
        v = sv(n, [])
        for e in edges:
            v = v + edge_shadow(n, e)
        return v

    def test_bounded_is_exact(self):
        rng = random.Random(0)
        v = self.member(31, [edge_at_centered(31, rng.randrange(-9, 10),
                                              rng.randrange(-9, 10))
                             for _ in range(3)])
        res = run_cli("decompose", "--n", "31", stdin=json.dumps(v.to_json()))
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        phi = SignedEdgeSet.from_json(obj["phi"])
        assert shadow(phi) == v
        assert obj["size"] == phi.size()

    def test_leave_with_matching_pair(self):
        e = edge_at_centered(101, 1, 2)
        v = self.member(101, [e])
        res = run_cli("decompose", "--n", "101", "--method", "leave",
                      "--radius", "4", "--region", "101",
                      stdin=json.dumps(v.to_json()))
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        pair = obj["matching_pair"]
        acc = {}
        for x, y in pair["positive"]:
            acc[(x, y)] = acc.get((x, y), 0) + 1
        for x, y in pair["negative"]:
            acc[(x, y)] = acc.get((x, y), 0) - 1
        from torq.board import Edge

        assert shadow(SignedEdgeSet(101, {Edge(x, y): m for (x, y), m in acc.items()})) == v

    def test_leave_requires_radius(self):
        v = sv(31, [])
        res = run_cli("decompose", "--n", "31", "--method", "leave",
                      stdin=json.dumps(v.to_json()))
        assert res.returncode == 2

    def test_non_member_rejected(self):
        obj = {"n": 31, "kind": "queens",
               "entries": [{"part": "X", "coord": 0, "weight": 1}]}
        res = run_cli("decompose", "--n", "31", stdin=json.dumps(obj))
        assert res.returncode == 2


class TestZsc:
    def test_deterministic_per_seed(self):
        a = run_cli("zsc", "--n", "13", "--seed", "7")
        b = run_cli("zsc", "--n", "13", "--seed", "7")
        assert a.returncode == 0 and a.stdout == b.stdout
        obj = json.loads(a.stdout)
        assert obj["valid"] is True and obj["seed"] == 7

    def test_seed_changes_output(self):
        a = run_cli("zsc", "--n", "101", "--seed", "0")
        b = run_cli("zsc", "--n", "101", "--seed", "1")
        assert a.stdout != b.stdout


class TestGreedy:
    def test_trace_csv(self):
        res = run_cli("greedy", "--n", "25", "--stop", "0.5")
        assert res.returncode == 0
        lines = res.stdout.strip().splitlines()
        assert lines[0] == "i,Q,p,n2p4,eq,dmin,dmax,np3,ed,parity_disparity"
        assert len(lines) >= 10

    def test_campaign_json(self):
        res = run_cli("greedy", "--n", "51", "--seeds", "2", "--stop", "0.5")
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        assert obj["seeds"] == [0, 1]
        assert "inside_fraction_median" in obj["summary"]

    def test_out_file(self, tmp_path):
        path = tmp_path / "trace.csv"
        res = run_cli("greedy", "--n", "25", "--stop", "0.5", "--out", str(path))
        assert res.returncode == 0 and res.stdout == ""
        assert path.read_text().startswith("i,Q,p,")


class TestMonsky:
    def test_agreement(self):
        res = run_cli("monsky", "--n", "7")
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        assert obj["max_partial"] == 7 and obj["agrees"] is True

    def test_capacity(self):
        res = run_cli("monsky", "--n", "25")
        assert res.returncode == 3


class TestExtend:
    def test_search_produces_valid_placement(self):
        res = run_cli("extend", "--n", "30", "--timeout", "180")
        assert res.returncode == 0
        obj = json.loads(res.stdout)
        assert obj["mode"] == "classical" and len(obj["queens"]) == 30
        assert len(obj["fixed_queens"]) == 12
        assert len(obj["toroidal_attack_pairs"]) == 6


class TestErrors:
    def test_unknown_command(self):
        assert run_cli("frobnicate").returncode == 2

    def test_missing_required_flag(self):
        assert run_cli("count").returncode == 2
