import math

import pytest

from gabic import (ConfigurationError, Geometry, ModelParams, dispersion,
                   gamma, sites_for_time, validate)


def paper_geometry(n_sites=1200):
    return Geometry.braided(12, 4, n_sites)


class TestDispersion:
    def test_band_bottom(self):
        p = ModelParams(omega_c=0.0, xi=1.0)
        assert dispersion(0.0, p) == -2.0

    def test_band_centre(self):
        p = ModelParams(omega_c=0.0, xi=1.0)
        assert abs(dispersion(math.pi / 2, p)) < 1e-15

    def test_band_top(self):
        p = ModelParams(omega_c=0.0, xi=1.0)
        assert dispersion(math.pi, p) == 2.0

    def test_even_and_extremal(self):
        p = ModelParams(omega_c=0.3, xi=1.7)
        ks = [i * math.pi / 97 for i in range(98)]
        vals = [dispersion(k, p) for k in ks]
        for k in ks:
            assert dispersion(-k, p) == dispersion(k, p)
        assert min(vals) == dispersion(0.0, p) == p.omega_c - 2 * p.xi
        assert max(vals) == dispersion(math.pi, p) == p.omega_c + 2 * p.xi


class TestGamma:
    def test_paper_value(self):
        assert gamma(ModelParams(g=0.1, xi=1.0)) == pytest.approx(0.01, abs=1e-17)

    def test_zero_coupling(self):
        assert gamma(ModelParams(g=0.0)) == 0.0

    def test_arithmetic(self):
        assert gamma(ModelParams(g=0.2, xi=2.0)) == pytest.approx(0.02, abs=1e-17)


class TestValidation:
    def test_paper_config_ok(self):
        warnings = validate(ModelParams(), paper_geometry())
        assert warnings == []

    def test_coincident_sites(self):
        with pytest.raises(ConfigurationError, match="coincident"):
            Geometry(n1=5, n2=5, m1=9, m2=21, n_sites=100)

    def test_index_out_of_range(self):
        with pytest.raises(ConfigurationError, match="out of range"):
            Geometry(n1=0, n2=12, m1=4, m2=100, n_sites=100)

    def test_non_positive_xi(self):
        with pytest.raises(ConfigurationError, match="xi"):
            ModelParams(xi=0.0)

    def test_negative_couplings(self):
        with pytest.raises(ConfigurationError):
            ModelParams(g=-0.1)
        with pytest.raises(ConfigurationError):
            ModelParams(lam=-1.0)

    def test_unordered_legs(self):
        with pytest.raises(ConfigurationError, match="n1 < n2"):
            Geometry(n1=12, n2=0, m1=4, m2=16, n_sites=100)

    def test_detuned_atom_warns_not_raises(self):
        warnings = validate(ModelParams(omega_a=0.5), paper_geometry())
        assert len(warnings) == 1
        assert "band-centre" in warnings[0]

    def test_idempotent(self):
        p, g = ModelParams(), paper_geometry()
        assert validate(p, g) == validate(p, g)


class TestGeometry:
    def test_paper_accessors(self):
        g = paper_geometry()
        assert g.size1 == g.size2 == g.equal_size == 12
        assert g.separation == 4
        assert g.span == 16
        assert g.is_braided

    def test_unequal_sizes_reported(self):
        g = Geometry(n1=0, n2=12, m1=4, m2=18, n_sites=100)
        assert g.equal_size is None
        assert (g.size1, g.size2) == (12, 14)

    def test_non_braided_accepted(self):
        # separated arrangement: atom 2 entirely to the right of atom 1
        g = Geometry(n1=0, n2=4, m1=10, m2=14, n_sites=100)
        assert not g.is_braided
        assert validate(ModelParams(), g) == []

    def test_braided_centred_placement(self):
        g = Geometry.braided(12, 4, 1200)
        assert (g.n1, g.m1, g.n2, g.m2) == (592, 596, 604, 608)
        assert g.boundary_distance() == 591

    def test_non_integer_rejected(self):
        with pytest.raises(ConfigurationError):
            Geometry(n1=0.5, n2=12, m1=4, m2=16, n_sites=100)


def test_sites_for_time_rule():
    # span + 4 xi t + 40: twice the single-trip light-cone reach per side
    assert sites_for_time(16, 400.0, 1.0) == 1656
    assert sites_for_time(18, 600.0, 1.0) == 2458
    g = Geometry.braided(12, 4, sites_for_time(16, 400.0))
    assert g.boundary_distance() >= 2 * 400
