#include "lurecert/system.hpp"

#include <Eigen/LU>

#include <stdexcept>
#include <string>

namespace lurecert {

LureSystem::LureSystem(Matrix A, Matrix B1, Matrix B2, Matrix C1, Matrix C2,
                       double tol)
    : A_(std::move(A)),
      B1_(std::move(B1)),
      B2_(std::move(B2)),
      C1_(std::move(C1)),
      C2_(std::move(C2)) {
  const Eigen::Index n = A_.rows();
  if (A_.cols() != n) throw std::invalid_argument("LureSystem: A must be square");
  if (B1_.rows() != n || B2_.rows() != n)
    throw std::invalid_argument("LureSystem: input matrices must have n rows");
  if (C1_.cols() != n || C2_.cols() != n)
    throw std::invalid_argument("LureSystem: output matrices must have n cols");
  if (!is_metzler(A_, tol))
    throw std::invalid_argument("LureSystem: A must be Metzler");
  if (!is_nonneg(B1_, tol) || !is_nonneg(B2_, tol) || !is_nonneg(C1_, tol) ||
      !is_nonneg(C2_, tol))
    throw std::invalid_argument(
        "LureSystem: B1, B2, C1, C2 must be nonnegative");
}

Matrix LureSystem::closed_loop_A(const Matrix& S) const {
  if (S.rows() != m1() || S.cols() != p1())
    throw std::invalid_argument("closed_loop_A: gain must be m1 x p1");
  return A_ + B1_ * S * C1_;
}

namespace {

Matrix resolvent_apply(const LureSystem& sys, double s, const Matrix& B) {
  const Eigen::Index n = sys.A().rows();
  Matrix shifted = s * Matrix::Identity(n, n) - sys.A();
  Eigen::FullPivLU<Matrix> lu(shifted);
  if (!lu.isInvertible())
    throw std::invalid_argument(
        "transfer_eval: s = " + std::to_string(s) +
        " is in the spectrum of A, resolvent undefined");
  return lu.solve(B);
}

}  // namespace

TransferBlocks transfer_eval(const LureSystem& sys, double s) {
  const Matrix X1 = resolvent_apply(sys, s, sys.B1());
  const Matrix X2 = resolvent_apply(sys, s, sys.B2());
  return {sys.C1() * X1, sys.C1() * X2, sys.C2() * X1, sys.C2() * X2};
}

Matrix transfer_block(const LureSystem& sys, double s, int i, int j) {
  if (i < 1 || i > 2 || j < 1 || j > 2)
    throw std::invalid_argument("transfer_block: indices must be 1 or 2");
  const Matrix& B = (j == 1) ? sys.B1() : sys.B2();
  const Matrix& C = (i == 1) ? sys.C1() : sys.C2();
  return C * resolvent_apply(sys, s, B);
}

}  // namespace lurecert
