#ifndef KAPSM_DICTIONARY_HPP
#define KAPSM_DICTIONARY_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kapsm/kernels.hpp"

namespace kapsm {

// Coefficients of one real-valued estimate f = sum_b coeffs[b] * k(atom_b, .)
// over a Dictionary's atom set. Attached estimates grow in lockstep with the
// dictionary (a zero coefficient is appended on every admission).
struct FunctionEstimate {
    std::vector<double> coeffs;

    std::size_t size() const { return coeffs.size(); }
    void clear() { coeffs.clear(); }
};

struct AldResult {
    double distance = 0.0;        // residual RKHS norm of k(x,.) off the atom span
    Eigen::VectorXd proj_coeffs;  // expansion of the span projection over the atoms
};

struct AdmitResult {
    bool admitted = false;
    std::size_t index = 0;        // valid when admitted
    Eigen::VectorXd proj_coeffs;  // valid when projected
};

// Online dictionary with approximate-linear-dependency sparsification.
//
// Single-writer: admissions must not race with anything else. evaluate() only
// reads atoms and is safe concurrently between admissions; ald_distance()
// refreshes an internal inverse cache and counts as a writer.
class Dictionary {
public:
    Dictionary(KernelSpec spec, double alpha, double jitter = 1e-8,
               std::optional<std::size_t> max_atoms = std::nullopt);

    Dictionary(const Dictionary&) = delete;
    Dictionary& operator=(const Dictionary&) = delete;

    // Residual distance of k(x,.) from the current atom span, plus the span
    // projection coefficients. Distance is the raw RKHS quantity
    // sqrt(max(k(x,x) - k' (G + jitter I)^-1 k, 0)).
    AldResult ald_distance(const Eigen::VectorXd& x) const;

    // Admission test. A candidate is admitted when its residual distance is at
    // least alpha relative to the candidate's own section norm:
    //     dist >= alpha * sqrt(k(x,x)).
    // For normalized kernels (Gaussian) this is the plain dist >= alpha rule.
    // Admitted candidates extend the Gram bookkeeping and every attached
    // estimate; rejected ones return projection coefficients for folding.
    AdmitResult admit_or_project(const Eigen::VectorXd& x);

    // f(u) = sum_b coeffs[b] * k(atom_b, u). Throws if sizes disagree.
    double evaluate(const FunctionEstimate& f, const Eigen::VectorXd& u) const;

    void attach(FunctionEstimate& f);

    std::size_t size() const { return atoms_.size(); }
    const std::vector<Eigen::VectorXd>& atoms() const { return atoms_; }
    const KernelSpec& kernel() const { return spec_; }
    double alpha() const { return alpha_; }
    double jitter() const { return jitter_; }
    std::size_t rejected_full_count() const { return rejected_full_; }

    Eigen::Block<const Eigen::MatrixXd> gram() const;
    // Inverse of (gram + jitter I); refreshed on demand.
    Eigen::Block<const Eigen::MatrixXd> gram_inverse() const;

    void reserve(std::size_t n);

private:
    Eigen::VectorXd section(const Eigen::VectorXd& x) const;  // k(atom_b, x) for all b
    AldResult ald_from(const Eigen::VectorXd& k, double kxx) const;
    void ensure_inverse() const;
    void full_reinvert() const;
    void append_inverse_column(Eigen::Index b) const;  // extend inverse by gram column b
    void append_atom(const Eigen::VectorXd& x, const Eigen::VectorXd& k, double kxx);
    void grow_gram(Eigen::Index need);

    KernelSpec spec_;
    double alpha_;
    double jitter_;
    std::optional<std::size_t> max_atoms_;

    std::vector<Eigen::VectorXd> atoms_;
    Eigen::MatrixXd gram_store_;  // top-left size() block is live
    mutable Eigen::MatrixXd inv_store_;
    mutable Eigen::Index inv_rows_ = 0;       // leading block of inv_store_ that is valid
    mutable std::size_t updates_since_reinversion_ = 0;
    std::size_t rejected_full_ = 0;
    std::vector<FunctionEstimate*> attached_;

    static constexpr std::size_t kReinvertEvery = 512;
};

// Table-2 style accounting: rank of the atom matrix, i.e. how much of the
// L-dimensional linear capacity the dictionary spans.
std::size_t atom_matrix_rank(const Dictionary& dict);

// Flat CSV dump: atom index, attached coefficient columns, atom components.
void write_dictionary_snapshot(std::ostream& os, const Dictionary& dict,
                               const FunctionEstimate* coeff_re,
                               const FunctionEstimate* coeff_im);

}  // namespace kapsm

#endif
