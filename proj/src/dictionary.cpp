#include "kapsm/dictionary.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace kapsm {

Dictionary::Dictionary(KernelSpec spec, double alpha, double jitter,
                       std::optional<std::size_t> max_atoms)
    : spec_(spec), alpha_(alpha), jitter_(jitter), max_atoms_(max_atoms) {
    spec_.validate();
    if (alpha_ < 0.0) throw std::invalid_argument("dictionary: alpha must be nonnegative");
    if (!(jitter_ > 0.0)) throw std::invalid_argument("dictionary: jitter must be positive");
}

Eigen::Block<const Eigen::MatrixXd> Dictionary::gram() const {
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    return {gram_store_, 0, 0, b, b};
}

Eigen::Block<const Eigen::MatrixXd> Dictionary::gram_inverse() const {
    ensure_inverse();
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    return {inv_store_, 0, 0, b, b};
}

void Dictionary::reserve(std::size_t n) { grow_gram(static_cast<Eigen::Index>(n)); }

void Dictionary::attach(FunctionEstimate& f) {
    f.coeffs.assign(atoms_.size(), 0.0);
    attached_.push_back(&f);
}

Eigen::VectorXd Dictionary::section(const Eigen::VectorXd& x) const {
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    Eigen::VectorXd k(b);
    for (Eigen::Index i = 0; i < b; ++i) k[i] = kernel_eval(spec_, atoms_[static_cast<std::size_t>(i)], x);
    return k;
}

void Dictionary::full_reinvert() const {
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    if (inv_store_.rows() < gram_store_.rows()) inv_store_.resize(gram_store_.rows(), gram_store_.cols());
    Eigen::MatrixXd reg = gram_store_.topLeftCorner(b, b);
    reg.diagonal().array() += jitter_;
    inv_store_.topLeftCorner(b, b) = reg.ldlt().solve(Eigen::MatrixXd::Identity(b, b));
    inv_rows_ = b;
    updates_since_reinversion_ = 0;
}

void Dictionary::append_inverse_column(Eigen::Index b) const {
    // Grow the inverse of (G + jitter I) from b x b to (b+1) x (b+1) by the
    // bordered block-inverse identity; the jittered Schur complement stays
    // well away from zero even for a linearly dependent candidate.
    const auto k = gram_store_.col(b).head(b);
    const double kxx = gram_store_(b, b);
    const auto a_inv = inv_store_.topLeftCorner(b, b);
    Eigen::VectorXd v = a_inv * k;
    double s = kxx + jitter_ - k.dot(v);
    if (s < jitter_) s = jitter_;
    if (inv_store_.rows() < gram_store_.rows()) {
        Eigen::MatrixXd bigger(gram_store_.rows(), gram_store_.cols());
        bigger.topLeftCorner(inv_rows_, inv_rows_) = inv_store_.topLeftCorner(inv_rows_, inv_rows_);
        inv_store_.swap(bigger);
    }
    inv_store_.topLeftCorner(b, b) += (v * v.transpose()) / s;
    inv_store_.col(b).head(b) = -v / s;
    inv_store_.row(b).head(b) = inv_store_.col(b).head(b).transpose();
    inv_store_(b, b) = 1.0 / s;
    inv_rows_ = b + 1;
    ++updates_since_reinversion_;
}

void Dictionary::ensure_inverse() const {
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    if (inv_rows_ == b) return;
    if (inv_rows_ > b || b - inv_rows_ > 16 || updates_since_reinversion_ + static_cast<std::size_t>(b - inv_rows_) >= kReinvertEvery) {
        full_reinvert();
        return;
    }
    while (inv_rows_ < b) append_inverse_column(inv_rows_);
}

AldResult Dictionary::ald_from(const Eigen::VectorXd& k, double kxx) const {
    AldResult r;
    if (atoms_.empty()) {
        r.distance = std::sqrt(std::max(kxx, 0.0));
        r.proj_coeffs.resize(0);
        return r;
    }
    ensure_inverse();
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    r.proj_coeffs = inv_store_.topLeftCorner(b, b) * k;
    r.distance = std::sqrt(std::max(kxx - k.dot(r.proj_coeffs), 0.0));
    return r;
}

AldResult Dictionary::ald_distance(const Eigen::VectorXd& x) const {
    if (!x.allFinite()) throw std::invalid_argument("ald_distance: non-finite input");
    return ald_from(section(x), kernel_eval(spec_, x, x));
}

void Dictionary::grow_gram(Eigen::Index need) {
    if (gram_store_.rows() >= need) return;
    Eigen::Index cap = gram_store_.rows() == 0 ? 16 : gram_store_.rows();
    while (cap < need) cap *= 2;
    Eigen::MatrixXd bigger(cap, cap);
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    bigger.topLeftCorner(b, b) = gram_store_.topLeftCorner(b, b);
    gram_store_.swap(bigger);
}

void Dictionary::append_atom(const Eigen::VectorXd& x, const Eigen::VectorXd& k, double kxx) {
    const auto b = static_cast<Eigen::Index>(atoms_.size());
    grow_gram(b + 1);
    gram_store_.col(b).head(b) = k;
    gram_store_.row(b).head(b) = k.transpose();
    gram_store_(b, b) = kxx;
    atoms_.push_back(x);
    if (inv_rows_ == b) {
        // keep the inverse warm while it is already current
        ensure_inverse();
    }
    for (FunctionEstimate* f : attached_) f->coeffs.push_back(0.0);
}

AdmitResult Dictionary::admit_or_project(const Eigen::VectorXd& x) {
    if (!x.allFinite()) throw std::invalid_argument("admit_or_project: non-finite input");
    if (!atoms_.empty() && x.size() != atoms_.front().size())
        throw std::invalid_argument("admit_or_project: dimension mismatch");

    const double kxx = kernel_eval(spec_, x, x);
    AdmitResult res;
    if (kxx <= 0.0) {
        // zero-norm section carries no information; fold to nothing
        res.admitted = false;
        res.proj_coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(atoms_.size()));
        return res;
    }
    if (max_atoms_ && atoms_.size() >= *max_atoms_) {
        ++rejected_full_;
        res.admitted = false;
        res.proj_coeffs = ald_distance(x).proj_coeffs;
        return res;
    }
    if (alpha_ == 0.0) {
        // sparsification disabled: every candidate passes dist >= 0
        const Eigen::VectorXd k = section(x);
        res.admitted = true;
        res.index = atoms_.size();
        append_atom(x, k, kxx);
        return res;
    }

    const Eigen::VectorXd k = section(x);
    AldResult ald = ald_from(k, kxx);
    if (ald.distance >= alpha_ * std::sqrt(kxx)) {
        res.admitted = true;
        res.index = atoms_.size();
        append_atom(x, k, kxx);
    } else {
        res.admitted = false;
        res.proj_coeffs = std::move(ald.proj_coeffs);
    }
    return res;
}

double Dictionary::evaluate(const FunctionEstimate& f, const Eigen::VectorXd& u) const {
    if (f.coeffs.size() != atoms_.size())
        throw std::invalid_argument("evaluate: estimate size does not match dictionary");
    double acc = 0.0;
    for (std::size_t b = 0; b < atoms_.size(); ++b)
        acc += f.coeffs[b] * kernel_eval(spec_, atoms_[b], u);
    return acc;
}

std::size_t atom_matrix_rank(const Dictionary& dict) {
    if (dict.size() == 0) return 0;
    const auto& atoms = dict.atoms();
    const Eigen::Index dim = atoms.front().size();
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t b = 0; b < atoms.size(); ++b) m.col(static_cast<Eigen::Index>(b)) = atoms[b];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    return static_cast<std::size_t>(qr.rank());
}

void write_dictionary_snapshot(std::ostream& os, const Dictionary& dict,
                               const FunctionEstimate* coeff_re,
                               const FunctionEstimate* coeff_im) {
    const auto& atoms = dict.atoms();
    os << "atom";
    if (coeff_re) os << ",coeff_re";
    if (coeff_im) os << ",coeff_im";
    const Eigen::Index dim = atoms.empty() ? 0 : atoms.front().size();
    for (Eigen::Index d = 0; d < dim; ++d) os << ",x" << d;
    os << "\n";
    char buf[64];
    for (std::size_t b = 0; b < atoms.size(); ++b) {
        os << b;
        if (coeff_re) {
            std::snprintf(buf, sizeof buf, ",%.17g", coeff_re->coeffs[b]);
            os << buf;
        }
        if (coeff_im) {
            std::snprintf(buf, sizeof buf, ",%.17g", coeff_im->coeffs[b]);
            os << buf;
        }
        for (Eigen::Index d = 0; d < dim; ++d) {
            std::snprintf(buf, sizeof buf, ",%.17g", atoms[b][d]);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace kapsm
