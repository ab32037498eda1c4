import pytest
import torch

from panel_fusion import penalty


def _radial_oracle(w: torch.Tensor, spec: penalty.PenaltySpec, step: float) -> torch.Tensor:
    """Minimize (step / 2) ||u - w||^2 + P(||u||) by grid search on u = r w / ||w||.

    The minimizer is colinear with w, so a 1-D search along the ray is exhaustive. The grid
    is refined once around the coarse minimum.
    """
    norm = float(torch.linalg.vector_norm(w))
    radii = torch.linspace(0.0, norm + 1.0, 20001, dtype=torch.float64)
    for _ in range(2):
        values = 0.5 * step * (radii - norm) ** 2 + penalty.penalty_value(radii, spec)
        best = float(radii[torch.argmin(values)])
        width = float(radii[1] - radii[0])
        radii = torch.linspace(
            max(best - 2 * width, 0.0), best + 2 * width, 2001, dtype=torch.float64
        )
    values = 0.5 * step * (radii - norm) ** 2 + penalty.penalty_value(radii, spec)
    return float(radii[torch.argmin(values)]) * w / norm


@pytest.mark.parametrize(
    "kind, concavity, step",
    [
        ("lasso", None, 1.0),
        ("lasso", None, 0.5),
        ("scad", 3.7, 1.0),
        ("scad", 4.5, 0.5),
        ("mcp", 3.0, 1.0),
        ("mcp", 2.5, 0.8),
    ],
)
def test_prox_is_exact_minimizer(kind, concavity, step):
    generator = torch.Generator().manual_seed(7)
    spec = penalty.PenaltySpec(kind=kind, level=1.0, concavity=concavity)
    for _ in range(25):
        w = 4 * torch.randn(2, generator=generator, dtype=torch.float64)
        expected = _radial_oracle(w, spec, step)
        assert torch.allclose(penalty.prox(w, spec, step), expected, atol=1e-4)


def _lattice_oracle(w: torch.Tensor, spec: penalty.PenaltySpec, step: float) -> torch.Tensor:
    """Minimize (step / 2) ||u - w||^2 + P(||u||) by zooming grid search over the plane."""
    center = w / 2
    half = float(torch.linalg.vector_norm(w)) / 2 + 1e-3
    for _ in range(14):
        axis = torch.linspace(-half, half, 81, dtype=torch.float64)
        offsets = torch.stack(torch.meshgrid(axis, axis, indexing="ij"), dim=-1).reshape(-1, 2)
        grid = center + offsets
        values = 0.5 * step * ((grid - w) ** 2).sum(dim=-1) + penalty.penalty_value(
            torch.linalg.vector_norm(grid, dim=-1), spec
        )
        center = grid[torch.argmin(values)]
        half = 8 * float(axis[1] - axis[0])
    return center


@pytest.mark.parametrize("kind", ["lasso", "scad", "mcp"])
def test_prox_matches_planar_grid_search(kind):
    generator = torch.Generator().manual_seed(13)

    def uniform(low: float, high: float) -> float:
        return low + (high - low) * float(torch.rand(1, generator=generator, dtype=torch.float64))

    for _ in range(100):
        level, step = uniform(0.1, 2.0), uniform(0.5, 4.0)
        if kind == "scad":
            concavity = 1 / step + 1 + uniform(0.5, 3.0)
        elif kind == "mcp":
            concavity = 1 / step + uniform(0.5, 3.0)
        else:
            concavity = None
        spec = penalty.PenaltySpec(kind=kind, level=level, concavity=concavity)

        scale = level * (spec.concavity if concavity else 2.0)
        w = scale * torch.randn(2, generator=generator, dtype=torch.float64)
        expected = _lattice_oracle(w, spec, step)
        assert torch.allclose(penalty.prox(w, spec, step), expected, atol=1e-4)


@pytest.mark.parametrize("kind", ["lasso", "scad", "mcp"])
def test_prox_is_rotation_equivariant(kind):
    generator = torch.Generator().manual_seed(0)
    spec = penalty.PenaltySpec(kind=kind, level=0.7)
    for _ in range(20):
        w = 3 * torch.randn(3, generator=generator, dtype=torch.float64)
        q, _ = torch.linalg.qr(torch.randn(3, 3, generator=generator, dtype=torch.float64))
        assert torch.allclose(
            penalty.prox(q @ w, spec, 1.0), q @ penalty.prox(w, spec, 1.0), atol=1e-12
        )


@pytest.mark.parametrize("kind", ["lasso", "scad", "mcp"])
def test_prox_of_zero_is_zero(kind):
    spec = penalty.PenaltySpec(kind=kind, level=1.0)
    assert torch.equal(penalty.prox(torch.zeros(4, 3), spec, 1.0), torch.zeros(4, 3, dtype=torch.float64))


@pytest.mark.parametrize("kind", ["lasso", "scad", "mcp"])
def test_prox_is_continuous(kind):
    spec = penalty.PenaltySpec(kind=kind, level=1.0)
    norms = torch.linspace(0.0, 6.0, 60001, dtype=torch.float64)
    w = torch.stack([norms, torch.zeros_like(norms)], dim=-1)
    jumps = penalty.prox(w, spec, 1.0)[:, 0].diff().abs()
    assert float(jumps.max()) < 1e-3


def test_concave_prox_tends_to_soft_threshold():
    w = torch.tensor([[0.3, 0.4], [1.5, -2.0], [30.0, 40.0]], dtype=torch.float64)
    expected = penalty.soft_threshold(w, 1.0)
    assert torch.allclose(penalty.prox_scad(w, level=1.0, step=1.0, a=1e6), expected, atol=1e-6)
    assert torch.allclose(penalty.prox_mcp(w, level=1.0, step=1.0, a=1e6), expected, atol=1e-4)


@pytest.mark.parametrize("kind, concavity", [("scad", 3.7), ("mcp", 3.0)])
def test_penalty_is_flat_beyond_concavity(kind, concavity):
    spec = penalty.PenaltySpec(kind=kind, level=0.8, concavity=concavity)
    kappa = torch.linspace(concavity * 0.8, 50.0, 100, dtype=torch.float64)
    values = penalty.penalty_value(kappa, spec)
    assert torch.allclose(values, values[0].expand_as(values))


def test_penalty_rejects_unknown_kind():
    with pytest.raises(ValueError, match="Unknown penalty"):
        penalty.PenaltySpec(kind="ridge", level=1.0)
