"""Deterministic synthetic generator and its RNG."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coocbias.dataset import parse_jsonl, serialize_jsonl
from coocbias.synth import BiasSpec, SplitMix64, generate

PROPERTY_SETTINGS = settings(max_examples=200, deadline=None)

TWO_GROUPS = {
    "landbird": ("bamboo", "field", "forest", "grass", "tree"),
    "waterbird": ("beach", "boat", "dock", "lake", "ocean"),
}


def reference_splitmix64(seed, n):
    """Straight transcription of the published C reference, used as oracle."""
    mask = (1 << 64) - 1
    x = seed & mask
    out = []
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & mask
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


class TestSplitMix64:
    def test_matches_reference(self):
        for seed in (0, 1, 42, 2**64 - 1, 0xDEADBEEF):
            rng = SplitMix64(seed)
            assert [rng.next_u64() for _ in range(50)] == reference_splitmix64(seed, 50)

    def test_seed_wraps_to_64_bits(self):
        assert SplitMix64(2**64 + 5).next_u64() == SplitMix64(5).next_u64()

    @PROPERTY_SETTINGS
    @given(st.integers(0, 2**64 - 1))
    def test_random_unit_interval(self, seed):
        rng = SplitMix64(seed)
        for _ in range(20):
            u = rng.random()
            assert 0.0 <= u < 1.0

    @PROPERTY_SETTINGS
    @given(st.integers(0, 2**64 - 1), st.integers(1, 100))
    def test_randrange_in_range(self, seed, n):
        rng = SplitMix64(seed)
        for _ in range(20):
            assert 0 <= rng.randrange(n) < n

    def test_randrange_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            SplitMix64(0).randrange(0)

    def test_sample_distinct_members(self):
        rng = SplitMix64(9)
        items = [f"i{j}" for j in range(10)]
        for _ in range(50):
            got = rng.sample(items, 4)
            assert len(set(got)) == 4
            assert set(got) <= set(items)

    def test_sample_too_large_rejected(self):
        with pytest.raises(ValueError):
            SplitMix64(0).sample(["a"], 2)

    def test_randrange_roughly_uniform(self):
        rng = SplitMix64(123)
        buckets = [0] * 7
        for _ in range(7000):
            buckets[rng.randrange(7)] += 1
        assert min(buckets) > 800  # expectation 1000 per bucket


class TestBiasSpecValidation:
    def good(self, **overrides):
        kwargs = dict(groups=TWO_GROUPS, rho=0.95, per_class_n=10, concepts_per_record=(1, 3))
        kwargs.update(overrides)
        return BiasSpec(**kwargs)

    def test_accepts_valid(self):
        self.good()

    def test_needs_two_classes(self):
        with pytest.raises(ValueError, match="two classes"):
            self.good(groups={"only": ("x",)})

    def test_rho_range(self):
        with pytest.raises(ValueError, match="rho"):
            self.good(rho=0.5)
        with pytest.raises(ValueError, match="rho"):
            self.good(rho=1.2)
        self.good(rho=1.0)

    def test_groups_disjoint(self):
        with pytest.raises(ValueError, match="appears in groups"):
            self.good(groups={"a": ("x", "y"), "b": ("y", "z")})

    def test_group_name_collision(self):
        with pytest.raises(ValueError, match="both a class and a concept"):
            self.good(groups={"a": ("b",), "b": ("z",)})

    def test_range_within_group_size(self):
        with pytest.raises(ValueError, match="smallest group"):
            self.good(concepts_per_record=(1, 6))
        with pytest.raises(ValueError, match="lo <= hi"):
            self.good(concepts_per_record=(0, 3))
        with pytest.raises(ValueError, match="lo <= hi"):
            self.good(concepts_per_record=(3, 2))

    def test_per_class_n_positive(self):
        with pytest.raises(ValueError, match="per_class_n"):
            self.good(per_class_n=0)


class TestGenerate:
    def spec(self, rho=0.95, n=200, rng=(1, 3)):
        return BiasSpec(groups=TWO_GROUPS, rho=rho, per_class_n=n, concepts_per_record=rng)

    def test_shape(self):
        ds = generate(self.spec(n=100), seed=7)
        assert ds.n == 200
        assert ds.classes == ("landbird", "waterbird")
        assert len(ds.concepts) == 10
        assert [r.id for r in ds.records[:2]] == ["landbird-0", "landbird-1"]
        assert ds.records[100].id == "waterbird-0"

    def test_deterministic(self):
        a = generate(self.spec(), seed=11)
        b = generate(self.spec(), seed=11)
        assert a == b
        assert serialize_jsonl(a) == serialize_jsonl(b)
        c = generate(self.spec(), seed=12)
        assert a != c

    def test_round_trips_through_parser(self):
        ds = generate(self.spec(n=50), seed=3)
        ds2, rep = parse_jsonl(serialize_jsonl(ds))
        assert rep.ok
        assert ds2 == ds

    def test_sizes_within_bounds(self):
        ds = generate(self.spec(rng=(2, 4), n=300), seed=5)
        for r in ds.records:
            assert 2 <= len(r.concepts) <= 4

    def test_each_record_single_group(self):
        groups = {y: set(g) for y, g in TWO_GROUPS.items()}
        ds = generate(self.spec(n=300), seed=9)
        for r in ds.records:
            hits = [y for y, g in groups.items() if set(r.concepts) <= g]
            assert len(hits) == 1  # concepts never straddle groups

    def test_rho_one_no_cross_group(self):
        groups = {y: set(g) for y, g in TWO_GROUPS.items()}
        ds = generate(self.spec(rho=1.0, n=500), seed=21)
        for r in ds.records:
            assert set(r.concepts) <= groups[r.label]

    def test_rho_095_cross_fraction(self):
        groups = {y: set(g) for y, g in TWO_GROUPS.items()}
        ds = generate(self.spec(rho=0.95, n=2000), seed=7)
        cross = sum(1 for r in ds.records if not set(r.concepts) <= groups[r.label])
        # expectation 5% of 4000 = 200; allow a generous band
        assert 120 <= cross <= 280

    def test_three_classes_cross_pick_uniformish(self):
        groups = {
            "a": ("a1", "a2", "a3"),
            "b": ("b1", "b2", "b3"),
            "c": ("c1", "c2", "c3"),
        }
        spec = BiasSpec(groups=groups, rho=0.6, per_class_n=3000, concepts_per_record=(1, 2))
        ds = generate(spec, seed=13)
        sets = {y: set(g) for y, g in groups.items()}
        tallies = {"b": 0, "c": 0}
        for r in ds.records:
            if r.label != "a":
                continue
            if set(r.concepts) <= sets["a"]:
                continue
            for other in ("b", "c"):
                if set(r.concepts) <= sets[other]:
                    tallies[other] += 1
        total = sum(tallies.values())
        assert total > 800  # about 40% of 3000
        assert abs(tallies["b"] - tallies["c"]) < total * 0.2
