#pragma once

#include <Eigen/SparseCore>
#include <complex>
#include <string>
#include <vector>

namespace cqed {

using cd = std::complex<double>;
// Column-major compressed storage gives the canonical (col, row)-sorted
// entry order the equality tests rely on.
using SpMat = Eigen::SparseMatrix<cd>;

// Two travelling-wave cavity modes (cw, ccw) and a two-level emitter.
// Basis ordering: (cw photon) x (ccw photon) x (emitter), row-major, i.e.
// index = (n_cw * (N+1) + n_ccw) * 2 + excited.
struct HilbertLayout {
  int fock_cutoff = 8;  // highest retained photon number per mode

  int fock_dim() const { return fock_cutoff + 1; }
  int dim() const { return 2 * fock_dim() * fock_dim(); }
  int index(int n_cw, int n_ccw, int excited) const {
    return (n_cw * fock_dim() + n_ccw) * 2 + excited;
  }
};

enum class Slot { mode_cw = 0, mode_ccw = 1, emitter = 2 };

SpMat annihilation(int fock_cutoff);
SpMat number_op(int fock_cutoff);
SpMat lowering_sigma();  // |g><e| on the emitter's {|g>, |e>} basis
SpMat identity_op(int dim);

// Embed a single-factor operator into the composite space (identity on the
// other tensor factors).
SpMat embed(const SpMat& op, Slot slot, const HilbertLayout& layout);

// Drop entries below rel_tol * max|entry| and compress to canonical order.
void prune(SpMat& m, double rel_tol = 1e-15);

// L acting on column-stacked vec(rho):
//   d rho/dt = -i [H, rho] + sum_k (C_k rho C_k^+ - 1/2 {C_k^+ C_k, rho}).
SpMat lindblad_superoperator(const SpMat& hamiltonian,
                             const std::vector<SpMat>& collapse);

// Coordinate-list debug dump, one "row col re im" line per stored entry.
std::string dump_coordinates(const SpMat& m);

}  // namespace cqed
