#pragma once

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "acflow/fe_space.hpp"
#include "acflow/sparse.hpp"

namespace acflow {

/// Weight of a weighted form: a constant, a finite element field, or one value per cell.
class Coefficient {
 public:
  Coefficient(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  static Coefficient field(const ScalarField& f);
  static Coefficient per_cell(std::vector<double> values);

  /// Values at the quadrature points of `cell`.
  std::array<double, CellBasis::kPoints> at_points(const Mesh& mesh, std::size_t cell) const;
  void check(const FeSpace& space) const;

 private:
  Coefficient() = default;
  double value_ = 0.0;
  const ScalarField* field_ = nullptr;
  std::vector<double> cells_;
};

namespace form {
struct Mass {};
struct WeightedMass {
  Coefficient weight;
};
/// (eps(u), eps(v)); vector spaces only.
struct StiffnessEps {};
/// (div u, div v); vector spaces only.
struct GradDiv {};
/// ((b . grad) u, v); block diagonal on vector spaces.
struct Convection {
  const VectorField* velocity;
};
/// (w grad u, grad v); scalar spaces only.
struct DiffusionScalar {
  Coefficient weight;
};
}  // namespace form

using FormDescriptor =
    std::variant<form::Mass, form::WeightedMass, form::StiffnessEps, form::GradDiv, form::Convection, form::DiffusionScalar>;

enum class Components { scalar = 1, vector = 2 };

/// Galerkin matrices on one space. All matrices produced by an Assembler
/// share the element-connectivity pattern for their component count, so they
/// can be combined with SparseMatrix::add_scaled. Element contributions are
/// accumulated in cell order, so repeated assembly is bitwise reproducible.
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const FeSpace> space);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }

  /// Zero matrix with the full pattern.
  const SparseMatrix& pattern(Components comps) const;

  SparseMatrix assemble(const FormDescriptor& form, Components comps) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  SparseMatrix scalar_pattern_;
  SparseMatrix vector_pattern_;
};

SparseMatrix assemble_form(const std::shared_ptr<const FeSpace>& space, const FormDescriptor& form,
                           Components comps = Components::scalar);

/// Load vectors (f, v_i) computed with the element quadrature rule.
std::vector<double> assemble_rhs(const FeSpace& space, const ScalarFunction& f, double t);
/// Blocked layout, like VectorField.
std::vector<double> assemble_rhs(const FeSpace& space, const VectorFunction& f, double t);

/// (w eps(u), eps(v_i)) for every vector test function v_i.
std::vector<double> strain_load(const VectorField& u, const ScalarField* weight);
/// (grad p, v_i) with p in any scalar space on the same mesh.
std::vector<double> gradient_load(const ScalarField& p, const FeSpace& test_space);
/// (div u, q_i) with q_i in the given scalar test space.
std::vector<double> divergence_load(const VectorField& u, const FeSpace& test_space);
/// ((b . grad) w, v_i) for a scalar field w.
std::vector<double> transport_load(const VectorField& b, const ScalarField& w);
/// ((b . grad) w, v_i) for a vector field w, blocked.
std::vector<double> transport_load(const VectorField& b, const VectorField& w);

}  // namespace acflow
