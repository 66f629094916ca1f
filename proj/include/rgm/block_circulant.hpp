#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rgm/errors.hpp"

namespace rgm {

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

class BlockCirculant;
class BandedBlockCirculant;
class SymbolSpectrum;

/// Symmetric block-circulant matrix circ{C_0, ..., C_{N/2}, ..., C_1^T},
/// stored as its N/2 + 1 generator blocks. Blocks for k > N/2 are implied
/// as C_{N-k}^T and never stored. N must be even, C_0 and C_{N/2} symmetric.
class BlockCirculant {
  public:
    BlockCirculant(int m, int N, std::vector<Matrix> blocks);

    int m() const { return m_; }
    int N() const { return N_; }
    int stored_blocks() const { return N_ / 2 + 1; }

    /// Stored generator block, 0 <= k <= N/2.
    const Matrix& block(int k) const { return blocks_[k]; }
    Matrix& block(int k) { return blocks_[k]; }

    /// Generator block for any index 0 <= k < N (transposes implied blocks).
    Matrix block_full(int k) const;

    const std::vector<Matrix>& blocks() const { return blocks_; }

  private:
    int m_;
    int N_;
    std::vector<Matrix> blocks_;
};

/// Bandwidth-n member of the banded subspace: blocks B_0..B_n stored,
/// everything up to N/2 implied zero. Requires 0 <= n < N/2, B_0 symmetric.
class BandedBlockCirculant {
  public:
    BandedBlockCirculant(int m, int N, int n, std::vector<Matrix> blocks);

    int m() const { return m_; }
    int N() const { return N_; }
    int band() const { return n_; }

    const Matrix& block(int k) const { return blocks_[k]; }
    Matrix& block(int k) { return blocks_[k]; }
    const std::vector<Matrix>& blocks() const { return blocks_; }

    /// Max absolute value over the off-diagonal entries of all stored blocks.
    double max_offdiag() const;

  private:
    int m_;
    int N_;
    int n_;
    std::vector<Matrix> blocks_;
};

/// The N frequency samples Phi(zeta^0)..Phi(zeta^{N-1}) of a symmetric
/// block-circulant matrix, zeta = exp(i 2 pi / N). Samples are Hermitian and
/// satisfy the conjugate reflection Phi(zeta^{N-l}) = conj(Phi(zeta^l)).
class SymbolSpectrum {
  public:
    SymbolSpectrum(int m, int N, std::vector<ComplexMatrix> samples);

    int m() const { return m_; }
    int N() const { return N_; }
    const ComplexMatrix& sample(int l) const { return samples_[l]; }
    ComplexMatrix& sample(int l) { return samples_[l]; }
    const std::vector<ComplexMatrix>& samples() const { return samples_; }

  private:
    int m_;
    int N_;
    std::vector<ComplexMatrix> samples_;
};

BlockCirculant make_circulant(int m, int N, std::vector<Matrix> blocks);
BandedBlockCirculant make_banded(int m, int N, int n, std::vector<Matrix> blocks);

/// Identity-scaled helpers.
BlockCirculant circulant_identity(int m, int N, double scale = 1.0);
BandedBlockCirculant banded_identity(int m, int N, int n, double scale = 1.0);

/// Frequency samples via an N-point DFT applied entrywise across the block
/// sequence; samples are Hermitian-symmetrized (drift beyond 1e-10 rejects).
SymbolSpectrum symbol_eval(const BlockCirculant& C);

/// Inverse DFT of the symbol samples. Requires the conjugate-reflection
/// invariant within 1e-10 (relative); imaginary residue below that is dropped.
BlockCirculant from_symbol(const SymbolSpectrum& spec);

/// Keep blocks C_0..C_n, zero the rest.
BandedBlockCirculant project_band(const BlockCirculant& C, int n);

/// Zero-padding injection of the banded space into the full circulant space.
BlockCirculant embed_banded(const BandedBlockCirculant& B);

/// tr(C^T D), computed blockwise as N * sum_k tr(C_k^T D_k) over all N
/// generator blocks (implied blocks expanded).
double inner_product(const BlockCirculant& C, const BlockCirculant& D);
double inner_product(const BandedBlockCirculant& A, const BandedBlockCirculant& B);

/// sum_l log det Phi(zeta^l); requires positive definiteness.
double logdet(const BlockCirculant& C);
double logdet(const SymbolSpectrum& spec);

/// Inverse through samplewise Hermitian inversion of the symbol.
BlockCirculant inverse(const BlockCirculant& C);
SymbolSpectrum inverse(const SymbolSpectrum& spec);

/// Smallest eigenvalue over all Hermitian symbol samples; positive iff the
/// full mN x mN matrix is positive definite.
double min_symbol_eig(const BlockCirculant& C);
double min_symbol_eig(const SymbolSpectrum& spec);

/// Dense mN x mN realization, block(r, s) = C_{(r-s) mod N}. Test oracle;
/// refuses mN beyond the safety limit.
Matrix to_dense(const BlockCirculant& C, int size_limit = 4096);
Matrix to_dense(const BandedBlockCirculant& B, int size_limit = 4096);

/// Blockwise a*C + b*D.
BlockCirculant lin_comb(double a, const BlockCirculant& C, double b, const BlockCirculant& D);
BandedBlockCirculant lin_comb(double a, const BandedBlockCirculant& C, double b,
                              const BandedBlockCirculant& D);

/// Max absolute entry over the stored generator blocks.
double max_abs(const BlockCirculant& C);
double max_abs(const BandedBlockCirculant& B);

}  // namespace rgm
