#include "cqed/operators.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cqed {

SpMat annihilation(int fock_cutoff) {
  if (fock_cutoff < 1) throw std::domain_error("fock cutoff must be >= 1");
  const int n = fock_cutoff + 1;
  SpMat a(n, n);
  a.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int k = 1; k < n; ++k) a.insert(k - 1, k) = std::sqrt(double(k));
  a.makeCompressed();
  return a;
}

SpMat number_op(int fock_cutoff) {
  const int n = fock_cutoff + 1;
  SpMat m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int k = 1; k < n; ++k) m.insert(k, k) = double(k);
  m.makeCompressed();
  return m;
}

SpMat lowering_sigma() {
  SpMat s(2, 2);
  s.insert(0, 1) = 1.0;  // |g><e|
  s.makeCompressed();
  return s;
}

SpMat identity_op(int dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

SpMat embed(const SpMat& op, Slot slot, const HilbertLayout& layout) {
  const int nf = layout.fock_dim();
  const int expected = slot == Slot::emitter ? 2 : nf;
  if (op.rows() != expected || op.cols() != expected)
    throw std::domain_error("embed: operator dimension does not match slot");

  const SpMat id_f = identity_op(nf);
  const SpMat id_e = identity_op(2);
  SpMat out;
  switch (slot) {
    case Slot::mode_cw:
      out = Eigen::kroneckerProduct(op, Eigen::kroneckerProduct(id_f, id_e)).eval();
      break;
    case Slot::mode_ccw:
      out = Eigen::kroneckerProduct(id_f, Eigen::kroneckerProduct(op, id_e)).eval();
      break;
    case Slot::emitter:
      out = Eigen::kroneckerProduct(Eigen::kroneckerProduct(id_f, id_f), op).eval();
      break;
  }
  out.makeCompressed();
  return out;
}

void prune(SpMat& m, double rel_tol) {
  double max_abs = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      max_abs = std::max(max_abs, std::abs(it.value()));
  if (max_abs == 0.0) return;
  m.prune([&](int, int, const cd& v) { return std::abs(v) > rel_tol * max_abs; });
  m.makeCompressed();
}

SpMat lindblad_superoperator(const SpMat& hamiltonian,
                             const std::vector<SpMat>& collapse) {
  const Eigen::Index d = hamiltonian.rows();
  if (hamiltonian.cols() != d)
    throw std::domain_error("lindblad_superoperator: H must be square");
  const SpMat id = identity_op(int(d));

  // vec(A X B) = (B^T kron A) vec(X) for column-stacked vec.
  const SpMat ht = hamiltonian.transpose();
  SpMat kl(Eigen::kroneckerProduct(id, hamiltonian));
  SpMat kr(Eigen::kroneckerProduct(ht, id));
  SpMat lv = (cd(0, -1) * (kl - kr)).eval();

  for (const SpMat& c : collapse) {
    if (c.rows() != d || c.cols() != d)
      throw std::domain_error("lindblad_superoperator: collapse dimension mismatch");
    const SpMat cconj = c.conjugate();
    const SpMat cdc = (SpMat(c.adjoint()) * c).eval();
    const SpMat cdct = cdc.transpose();
    const SpMat jump(Eigen::kroneckerProduct(cconj, c));
    const SpMat acl(Eigen::kroneckerProduct(id, cdc));
    const SpMat acr(Eigen::kroneckerProduct(cdct, id));
    lv = (lv + jump - cd(0.5) * acl - cd(0.5) * acr).eval();
  }
  lv.makeCompressed();
  return lv;
}

std::string dump_coordinates(const SpMat& m) {
  std::ostringstream os;
  os.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
  return os.str();
}

}  // namespace cqed
