#include "acflow/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acflow/error.hpp"

namespace acflow {

namespace {

constexpr int kQ = CellBasis::kPoints;

SparseMatrix build_pattern(const FeSpace& space, int comps) {
  const std::size_t n = space.num_dofs();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const auto dofs = space.cell_dofs(k);
    for (int i : dofs) adj[i].insert(adj[i].end(), dofs.begin(), dofs.end());
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  const std::size_t total = n * comps;
  std::vector<int> rp(total + 1, 0), cols;
  for (int c = 0; c < comps; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < comps; ++d) {
        for (int j : adj[i]) cols.push_back(j + d * static_cast<int>(n));
      }
      rp[c * n + i + 1] = static_cast<int>(cols.size());
    }
  }
  std::vector<double> vals(cols.size(), 0.0);
  return SparseMatrix(total, std::move(rp), std::move(cols), std::move(vals));
}

// Adds a dense local block into the CSR matrix. Local indices run over
// (component, local dof) with component-major ordering.
void scatter(SparseMatrix& a, std::span<const int> dofs, int comps, std::size_t n, const std::vector<double>& local) {
  const int nl = static_cast<int>(dofs.size());
  const int size = nl * comps;
  auto vals = a.values();
  for (int r = 0; r < size; ++r) {
    const int row = dofs[r % nl] + (r / nl) * static_cast<int>(n);
    for (int c = 0; c < size; ++c) {
      const double v = local[r * size + c];
      if (v == 0.0) continue;
      const int col = dofs[c % nl] + (c / nl) * static_cast<int>(n);
      vals[a.find(row, col)] += v;
    }
  }
}

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  if (!a.shares_mesh(b)) throw Error(ErrorCode::space_mismatch, "fields live on different meshes");
}

}  // namespace

Coefficient Coefficient::field(const ScalarField& f) {
  Coefficient c;
  c.field_ = &f;
  return c;
}

Coefficient Coefficient::per_cell(std::vector<double> values) {
  Coefficient c;
  c.cells_ = std::move(values);
  return c;
}

void Coefficient::check(const FeSpace& space) const {
  if (field_ != nullptr) require_same_mesh(field_->space(), space);
  if (!cells_.empty() && cells_.size() != space.mesh().num_triangles()) {
    throw Error(ErrorCode::space_mismatch, "per-cell coefficient length does not match the mesh");
  }
}

std::array<double, CellBasis::kPoints> Coefficient::at_points(const Mesh& mesh, std::size_t cell) const {
  std::array<double, kQ> out{};
  if (field_ != nullptr) {
    const CellBasis cb(field_->space(), cell);
    for (int q = 0; q < kQ; ++q) out[q] = cb.eval(q, field_->values());
  } else if (!cells_.empty()) {
    out.fill(cells_[cell]);
  } else {
    out.fill(value_);
  }
  (void)mesh;
  return out;
}

Assembler::Assembler(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), scalar_pattern_(build_pattern(*space_, 1)), vector_pattern_(build_pattern(*space_, 2)) {}

const SparseMatrix& Assembler::pattern(Components comps) const {
  return comps == Components::scalar ? scalar_pattern_ : vector_pattern_;
}

SparseMatrix Assembler::assemble(const FormDescriptor& form, Components comps) const {
  const FeSpace& space = *space_;
  const int nc = static_cast<int>(comps);
  const bool is_vector = comps == Components::vector;
  if (std::holds_alternative<form::StiffnessEps>(form) || std::holds_alternative<form::GradDiv>(form)) {
    if (!is_vector) throw Error(ErrorCode::invalid_parameter, "strain and grad-div forms need a vector space");
  }
  if (std::holds_alternative<form::DiffusionScalar>(form) && is_vector) {
    throw Error(ErrorCode::invalid_parameter, "diffusion_scalar form needs a scalar space");
  }
  if (const auto* c = std::get_if<form::Convection>(&form)) {
    if (c->velocity == nullptr) throw Error(ErrorCode::invalid_parameter, "convection form without a velocity");
    require_same_mesh(c->velocity->space(), space);
  }
  if (const auto* w = std::get_if<form::WeightedMass>(&form)) w->weight.check(space);
  if (const auto* w = std::get_if<form::DiffusionScalar>(&form)) w->weight.check(space);

  SparseMatrix a = pattern(comps);
  const std::size_t n = space.num_dofs();
  const int nl = space.local_dofs();
  const int size = nl * nc;
  std::vector<double> local(static_cast<std::size_t>(size * size));

  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    std::fill(local.begin(), local.end(), 0.0);
    auto add_block_diag = [&](int i, int j, double v) {
      for (int c = 0; c < nc; ++c) local[(c * nl + i) * size + c * nl + j] += v;
    };

    std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, form::Mass>) {
            for (int q = 0; q < kQ; ++q)
              for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j) add_block_diag(i, j, cb.weight(q) * cb.value(q, i) * cb.value(q, j));
          } else if constexpr (std::is_same_v<F, form::WeightedMass>) {
            const auto w = f.weight.at_points(space.mesh(), k);
            for (int q = 0; q < kQ; ++q)
              for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j)
                  add_block_diag(i, j, cb.weight(q) * w[q] * cb.value(q, i) * cb.value(q, j));
          } else if constexpr (std::is_same_v<F, form::DiffusionScalar>) {
            const auto w = f.weight.at_points(space.mesh(), k);
            for (int q = 0; q < kQ; ++q)
              for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j)
                  add_block_diag(i, j, cb.weight(q) * w[q] * dot(cb.grad(q, i), cb.grad(q, j)));
          } else if constexpr (std::is_same_v<F, form::Convection>) {
            const CellBasis vb(f.velocity->space(), k);
            for (int q = 0; q < kQ; ++q) {
              const Vec2 b{vb.eval(q, f.velocity->x()), vb.eval(q, f.velocity->y())};
              for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j)
                  add_block_diag(i, j, cb.weight(q) * dot(b, cb.grad(q, j)) * cb.value(q, i));
            }
          } else if constexpr (std::is_same_v<F, form::StiffnessEps>) {
            for (int q = 0; q < kQ; ++q) {
              const double w = cb.weight(q);
              for (int i = 0; i < nl; ++i) {
                const Vec2 gi = cb.grad(q, i);
                for (int j = 0; j < nl; ++j) {
                  const Vec2 gj = cb.grad(q, j);
                  local[i * size + j] += w * (gj.x * gi.x + 0.5 * gj.y * gi.y);
                  local[i * size + nl + j] += w * 0.5 * gj.x * gi.y;
                  local[(nl + i) * size + j] += w * 0.5 * gj.y * gi.x;
                  local[(nl + i) * size + nl + j] += w * (gj.y * gi.y + 0.5 * gj.x * gi.x);
                }
              }
            }
          } else if constexpr (std::is_same_v<F, form::GradDiv>) {
            for (int q = 0; q < kQ; ++q) {
              const double w = cb.weight(q);
              for (int i = 0; i < nl; ++i) {
                const Vec2 gi = cb.grad(q, i);
                for (int j = 0; j < nl; ++j) {
                  const Vec2 gj = cb.grad(q, j);
                  local[i * size + j] += w * gj.x * gi.x;
                  local[i * size + nl + j] += w * gj.y * gi.x;
                  local[(nl + i) * size + j] += w * gj.x * gi.y;
                  local[(nl + i) * size + nl + j] += w * gj.y * gi.y;
                }
              }
            }
          }
        },
        form);
    scatter(a, cb.dofs(), nc, n, local);
  }
  return a;
}

SparseMatrix assemble_form(const std::shared_ptr<const FeSpace>& space, const FormDescriptor& form, Components comps) {
  return Assembler(space).assemble(form, comps);
}

namespace {

template <typename Fn>
auto checked_eval(const Fn& f, Point2 x, double t) {
  try {
    auto v = f(x, t);
    bool finite = true;
    if constexpr (std::is_same_v<decltype(v), double>) {
      finite = std::isfinite(v);
    } else {
      finite = std::isfinite(v.x) && std::isfinite(v.y);
    }
    if (!finite) throw Error(ErrorCode::source_evaluation_error, "non-finite source value");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::source_evaluation_error, e.what());
  }
}

}  // namespace

std::vector<double> assemble_rhs(const FeSpace& space, const ScalarFunction& f, double t) {
  std::vector<double> b(space.num_dofs(), 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    for (int q = 0; q < kQ; ++q) {
      const double fq = checked_eval(f, cb.point(q), t) * cb.weight(q);
      for (int i = 0; i < cb.size(); ++i) b[cb.dofs()[i]] += fq * cb.value(q, i);
    }
  }
  return b;
}

std::vector<double> assemble_rhs(const FeSpace& space, const VectorFunction& f, double t) {
  const std::size_t n = space.num_dofs();
  std::vector<double> b(2 * n, 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    for (int q = 0; q < kQ; ++q) {
      const Vec2 fq = cb.weight(q) * checked_eval(f, cb.point(q), t);
      for (int i = 0; i < cb.size(); ++i) {
        b[cb.dofs()[i]] += fq.x * cb.value(q, i);
        b[n + cb.dofs()[i]] += fq.y * cb.value(q, i);
      }
    }
  }
  return b;
}

std::vector<double> strain_load(const VectorField& u, const ScalarField* weight) {
  const FeSpace& space = u.space();
  if (weight != nullptr) require_same_mesh(weight->space(), space);
  const std::size_t n = space.num_dofs();
  std::vector<double> b(2 * n, 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    std::array<double, kQ> w{};
    w.fill(1.0);
    if (weight != nullptr) {
      if (&weight->space() == &space) {
        for (int q = 0; q < kQ; ++q) w[q] = cb.eval(q, weight->values());
      } else {
        w = Coefficient::field(*weight).at_points(space.mesh(), k);
      }
    }
    for (int q = 0; q < kQ; ++q) {
      const Vec2 gx = cb.eval_grad(q, u.x());
      const Vec2 gy = cb.eval_grad(q, u.y());
      // eps(u) = [[exx, exy], [exy, eyy]]
      const double exx = gx.x, eyy = gy.y, exy = 0.5 * (gx.y + gy.x);
      const double s = cb.weight(q) * w[q];
      for (int i = 0; i < cb.size(); ++i) {
        const Vec2 gi = cb.grad(q, i);
        b[cb.dofs()[i]] += s * (exx * gi.x + exy * gi.y);
        b[n + cb.dofs()[i]] += s * (exy * gi.x + eyy * gi.y);
      }
    }
  }
  return b;
}

std::vector<double> gradient_load(const ScalarField& p, const FeSpace& test_space) {
  require_same_mesh(p.space(), test_space);
  const std::size_t n = test_space.num_dofs();
  std::vector<double> b(2 * n, 0.0);
  for (std::size_t k = 0; k < test_space.mesh().num_triangles(); ++k) {
    const CellBasis cb(test_space, k);
    const CellBasis pb(p.space(), k);
    for (int q = 0; q < kQ; ++q) {
      const Vec2 g = cb.weight(q) * pb.eval_grad(q, p.values());
      for (int i = 0; i < cb.size(); ++i) {
        b[cb.dofs()[i]] += g.x * cb.value(q, i);
        b[n + cb.dofs()[i]] += g.y * cb.value(q, i);
      }
    }
  }
  return b;
}

std::vector<double> divergence_load(const VectorField& u, const FeSpace& test_space) {
  require_same_mesh(u.space(), test_space);
  std::vector<double> b(test_space.num_dofs(), 0.0);
  for (std::size_t k = 0; k < test_space.mesh().num_triangles(); ++k) {
    const CellBasis cb(test_space, k);
    const CellBasis ub(u.space(), k);
    for (int q = 0; q < kQ; ++q) {
      const double div = ub.eval_grad(q, u.x()).x + ub.eval_grad(q, u.y()).y;
      for (int i = 0; i < cb.size(); ++i) b[cb.dofs()[i]] += cb.weight(q) * div * cb.value(q, i);
    }
  }
  return b;
}

std::vector<double> transport_load(const VectorField& bfield, const ScalarField& w) {
  const FeSpace& space = w.space();
  require_same_mesh(bfield.space(), space);
  std::vector<double> out(space.num_dofs(), 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    const CellBasis vb(bfield.space(), k);
    for (int q = 0; q < kQ; ++q) {
      const Vec2 b{vb.eval(q, bfield.x()), vb.eval(q, bfield.y())};
      const double s = cb.weight(q) * dot(b, cb.eval_grad(q, w.values()));
      for (int i = 0; i < cb.size(); ++i) out[cb.dofs()[i]] += s * cb.value(q, i);
    }
  }
  return out;
}

std::vector<double> transport_load(const VectorField& bfield, const VectorField& w) {
  const FeSpace& space = w.space();
  require_same_mesh(bfield.space(), space);
  const std::size_t n = space.num_dofs();
  std::vector<double> out(2 * n, 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    const CellBasis vb(bfield.space(), k);
    for (int q = 0; q < kQ; ++q) {
      const Vec2 b{vb.eval(q, bfield.x()), vb.eval(q, bfield.y())};
      const double sx = cb.weight(q) * dot(b, cb.eval_grad(q, w.x()));
      const double sy = cb.weight(q) * dot(b, cb.eval_grad(q, w.y()));
      for (int i = 0; i < cb.size(); ++i) {
        out[cb.dofs()[i]] += sx * cb.value(q, i);
        out[n + cb.dofs()[i]] += sy * cb.value(q, i);
      }
    }
  }
  return out;
}

}  // namespace acflow
