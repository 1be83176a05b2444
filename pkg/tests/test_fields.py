import numpy as np
import pytest

from viscowri.errors import InvalidArgumentError
from viscowri.fields import (ComplexField, Grid2D, RealField, grad_x, grad_x_adjoint, grad_z, grad_z_adjoint,
                             gradient_operators, read_field, tv_norm, wrapped_phase, write_csv, write_field)

from conftest import random_complex


def test_grid_is_column_major(small_grid):
    iz, ix = 3, 7
    k = small_grid.index(iz, ix)
    assert k == 3 + 7 * 12
    assert tuple(small_grid.cell(k)) == (iz, ix)

    array = np.arange(small_grid.n).reshape(small_grid.shape, order='F')
    assert small_grid.to_array(np.arange(small_grid.n))[iz, ix] == k
    np.testing.assert_array_equal(small_grid.from_array(array), np.arange(small_grid.n))


def test_grid_coordinates(small_grid):
    z, x = small_grid.coordinates()
    k = small_grid.index(4, 2)
    assert z[k] == pytest.approx(40.0)
    assert x[k] == pytest.approx(20.0)


@pytest.mark.parametrize('nz, nx, h', [(1, 5, 1.0), (5, 5, 0.0), (4, 3, -1.0)])
def test_grid_rejects_degenerate_layouts(nz, nx, h):
    with pytest.raises(InvalidArgumentError):
        Grid2D(nz, nx, h)


def test_field_size_is_checked(small_grid):
    with pytest.raises(InvalidArgumentError):
        RealField(small_grid, np.zeros(small_grid.n - 1))


def test_polar_views(small_grid, rng):
    magnitude = rng.uniform(0.5, 2.0, small_grid.n)
    phase = rng.uniform(-3.0, 3.0, small_grid.n)
    field = ComplexField.from_polar(small_grid, magnitude, phase)
    np.testing.assert_allclose(field.magnitude.values, magnitude)
    np.testing.assert_allclose(field.phase.values, phase, atol=1e-12)


def test_wrapped_phase_edges():
    theta = wrapped_phase(np.array([0.0, -1.0, 1j, -1j]))
    assert theta[0] == 0.0
    assert theta[1] == pytest.approx(np.pi)
    assert theta[2] == pytest.approx(np.pi / 2)
    assert theta[3] == pytest.approx(-np.pi / 2)


def test_gradient_adjoints(small_grid, rng):
    f = ComplexField(small_grid, random_complex(rng, small_grid.n))
    g = ComplexField(small_grid, random_complex(rng, small_grid.n))
    for forward, adjoint in ((grad_x, grad_x_adjoint), (grad_z, grad_z_adjoint)):
        lhs = np.vdot(forward(f).values, g.values)
        rhs = np.vdot(f.values, adjoint(g).values)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)


def test_gradient_of_constant_is_zero(small_grid):
    f = RealField.constant(small_grid, 3.5)
    assert np.all(grad_x(f).values == 0)
    assert np.all(grad_z(f).values == 0)
    assert tv_norm(f) == 0.0


def test_gradient_of_ramp(small_grid):
    z, x = small_grid.coordinates()
    f = RealField(small_grid, 2.0 * x)
    gx = small_grid.to_array(grad_x(f).values)
    np.testing.assert_allclose(gx[:, :-1], 2.0)
    np.testing.assert_allclose(gx[:, -1], 0.0)
    np.testing.assert_allclose(grad_z(f).values, 0.0)
    assert tv_norm(f) == pytest.approx(2.0 * small_grid.nz * (small_grid.nx - 1))


def test_singleton_axis_has_no_difference():
    dx, dz = gradient_operators(1, 6, 1.0)
    assert dz.nnz == 0
    np.testing.assert_allclose(dx @ np.arange(6.0), [1, 1, 1, 1, 1, 0])


def test_vwf1_roundtrip(tmp_path, small_grid, rng):
    real = RealField(small_grid, rng.standard_normal(small_grid.n))
    cplx = ComplexField(small_grid, random_complex(rng, small_grid.n))
    write_field(tmp_path / 'r.vwf', real)
    write_field(tmp_path / 'c.vwf', cplx)

    raw = (tmp_path / 'c.vwf').read_bytes()
    assert raw[:4] == b'VWF1'
    assert len(raw) == 32 + 16 * small_grid.n

    back = read_field(tmp_path / 'r.vwf')
    assert isinstance(back, RealField) and back.grid == small_grid
    np.testing.assert_array_equal(back.values, real.values)
    back = read_field(tmp_path / 'c.vwf')
    assert isinstance(back, ComplexField)
    np.testing.assert_array_equal(back.values, cplx.values)


def test_vwf1_rejects_bad_files(tmp_path, small_grid):
    path = tmp_path / 'bad.vwf'
    path.write_bytes(b'NOPE 1 2 3 R'.ljust(31) + b'\n')
    with pytest.raises(InvalidArgumentError):
        read_field(path)

    write_field(tmp_path / 'short.vwf', RealField.constant(small_grid, 1.0))
    truncated = (tmp_path / 'short.vwf').read_bytes()[:-8]
    (tmp_path / 'short.vwf').write_bytes(truncated)
    with pytest.raises(InvalidArgumentError):
        read_field(tmp_path / 'short.vwf')

    with pytest.raises(InvalidArgumentError):
        read_field(tmp_path / 'missing.vwf')


def test_csv_rows_follow_the_grid(tmp_path, small_grid):
    field = ComplexField.constant(small_grid, 1 + 1j)
    path = write_csv(tmp_path / 'm.csv', field, part='imag')
    lines = path.read_text().strip().splitlines()
    assert len(lines) == small_grid.nz
    assert len(lines[0].split(',')) == small_grid.nx
