#pragma once

#include "lurecert/linalg.hpp"

namespace lurecert {

/// Four-block transfer matrix of a Lur'e interconnection, partitioned by the
/// feedback input/output (block 1) and the exogenous input / measured output
/// (block 2).
struct TransferBlocks {
  Matrix G11;  // feedback output from feedback input,  p1 x m1
  Matrix G12;  // feedback output from disturbance,     p1 x m2
  Matrix G21;  // measured output from feedback input,  p2 x m1
  Matrix G22;  // measured output from disturbance,     p2 x m2
};

/// State-space data of the forced Lur'e system
///   dx/dt = A x + B1 f(t, C1 x) + B2 w,   y1 = C1 x,   y2 = C2 x.
/// Construction validates the positivity structure: A Metzler and
/// B1, B2, C1, C2 nonnegative (within tolerance), with consistent dimensions.
class LureSystem {
 public:
  LureSystem(Matrix A, Matrix B1, Matrix B2, Matrix C1, Matrix C2,
             double tol = kConeTol);

  const Matrix& A() const { return A_; }
  const Matrix& B1() const { return B1_; }
  const Matrix& B2() const { return B2_; }
  const Matrix& C1() const { return C1_; }
  const Matrix& C2() const { return C2_; }

  int n() const { return static_cast<int>(A_.rows()); }
  int m1() const { return static_cast<int>(B1_.cols()); }
  int m2() const { return static_cast<int>(B2_.cols()); }
  int p1() const { return static_cast<int>(C1_.rows()); }
  int p2() const { return static_cast<int>(C2_.rows()); }

  /// Closed-loop state matrix A + B1 S C1 for a linear gain S.
  Matrix closed_loop_A(const Matrix& S) const;

 private:
  Matrix A_, B1_, B2_, C1_, C2_;
};

/// All four transfer blocks Gij(s) = Ci (sI - A)^{-1} Bj at a real point s.
/// Throws std::invalid_argument if sI - A is singular (s in the spectrum).
/// At s = 0 with A Hurwitz Metzler every block is entrywise nonnegative.
TransferBlocks transfer_eval(const LureSystem& sys, double s);

/// Single block Gij(s); i, j in {1, 2}.
Matrix transfer_block(const LureSystem& sys, double s, int i, int j);

}  // namespace lurecert
