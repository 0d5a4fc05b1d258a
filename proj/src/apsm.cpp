#include "kapsm/apsm.hpp"

#include <cmath>
#include <stdexcept>

namespace kapsm {

double beta_coefficient(double f_eval, const Hyperslab& slab, double kxx) {
    if (!(kxx > 0.0)) throw std::domain_error("beta_coefficient: kxx must be positive");
    const double err = slab.y - f_eval;
    if (err > slab.eps) return (err - slab.eps) / kxx;
    if (err < -slab.eps) return (err + slab.eps) / kxx;
    return 0.0;
}

void ApsmConfig::validate() const {
    if (!(mu > 0.0) || mu > 2.0) throw std::invalid_argument("apsm: mu must be in (0, 2]");
    if (q < 1) throw std::invalid_argument("apsm: q must be at least 1");
    if (eps < 0.0) throw std::invalid_argument("apsm: eps must be nonnegative");
    if (alpha < 0.0) throw std::invalid_argument("apsm: alpha must be nonnegative");
    kernel.validate();
}

double apply_projection_batch(const Dictionary& dict, FunctionEstimate& f,
                              const std::vector<Hyperslab>& slabs,
                              const std::vector<double>& weights,
                              const std::vector<int>& atom_indices,
                              const std::vector<Eigen::VectorXd>& fold_coeffs,
                              const Eigen::MatrixXd& slab_gram, double mu) {
    const std::size_t q = slabs.size();
    if (weights.size() != q || atom_indices.size() != q || fold_coeffs.size() != q ||
        slab_gram.rows() != static_cast<Eigen::Index>(q))
        throw std::invalid_argument("apply_projection_batch: inconsistent batch sizes");

    std::vector<double> wb(q, 0.0);  // weight_j * beta_j
    bool any = false;
    for (std::size_t j = 0; j < q; ++j) {
        const double kxx = slab_gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        if (!(kxx > 0.0)) continue;  // degenerate regressor, no projection direction
        const double beta = beta_coefficient(dict.evaluate(f, slabs[j].x), slabs[j], kxx);
        if (beta != 0.0) {
            wb[j] = weights[j] * beta;
            any = true;
        }
    }
    if (!any) return 1.0;

    // extrapolation: sum_j w_j |beta_j|^2 kxx_j over |sum_j w_j beta_j k(x_j,.)|^2
    double numer = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        if (wb[j] == 0.0) continue;
        const double b = wb[j] / weights[j];
        numer += weights[j] * b * b * slab_gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        if (wb[i] == 0.0) continue;
        for (std::size_t j = 0; j < q; ++j) {
            if (wb[j] == 0.0) continue;
            denom += wb[i] * wb[j] * slab_gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    const double m = denom < 1e-12 ? 1.0 : numer / denom;

    for (std::size_t j = 0; j < q; ++j) {
        if (wb[j] == 0.0) continue;
        const double c = mu * m * wb[j];
        const int idx = atom_indices[j];
        if (idx >= 0) {
            f.coeffs[static_cast<std::size_t>(idx)] += c;
        } else {
            const Eigen::VectorXd& p = fold_coeffs[j];
            for (Eigen::Index b = 0; b < p.size(); ++b)
                f.coeffs[static_cast<std::size_t>(b)] += c * p[b];
        }
    }
    return m;
}

ComplexApsmFilter::ComplexApsmFilter(ApsmConfig cfg, std::size_t dim)
    : cfg_(cfg), dim_(dim),
      dict_(cfg.kernel, cfg.alpha, cfg.jitter, cfg.max_atoms) {
    cfg_.validate();
    if (cfg_.reserve_atoms > 0) dict_.reserve(cfg_.reserve_atoms);
    dict_.attach(re_);
    dict_.attach(im_);
}

std::complex<double> ComplexApsmFilter::predict(const Eigen::VectorXd& x) const {
    return {dict_.evaluate(re_, x), dict_.evaluate(im_, x)};
}

UpdateReport ComplexApsmFilter::step(const Eigen::VectorXd& x, std::complex<double> y) {
    UpdateReport rep;
    if (!x.allFinite() || !std::isfinite(y.real()) || !std::isfinite(y.imag())) {
        rep.skipped = true;
        ++skipped_;
        return rep;
    }
    if (static_cast<std::size_t>(x.size()) != dim_)
        throw std::invalid_argument("apsm step: regressor dimension mismatch");

    rep.residual_pre = y - predict(x);

    // novelty-driven admission: the arriving regressor is tested once
    AdmitResult adm = dict_.admit_or_project(x);
    rep.admitted = adm.admitted;

    WindowEntry e;
    e.x = x;
    e.y_re = y.real();
    e.y_im = y.imag();
    if (adm.admitted) {
        e.atom_index = static_cast<int>(adm.index);
    } else {
        e.fold = std::move(adm.proj_coeffs);
        e.fold_dict_size = dict_.size();
    }
    window_.push_back(std::move(e));
    if (window_.size() > static_cast<std::size_t>(cfg_.q)) window_.pop_front();

    const std::size_t q = window_.size();
    std::vector<Hyperslab> slabs_re(q), slabs_im(q);
    std::vector<double> weights(q, 1.0 / static_cast<double>(q));
    std::vector<int> atom_indices(q);
    std::vector<Eigen::VectorXd> folds(q);
    Eigen::MatrixXd slab_gram(q, q);
    for (std::size_t j = 0; j < q; ++j) {
        WindowEntry& w = window_[j];
        if (w.atom_index < 0 && w.fold_dict_size != dict_.size()) {
            w.fold = dict_.ald_distance(w.x).proj_coeffs;  // dictionary grew, refresh
            w.fold_dict_size = dict_.size();
        }
        slabs_re[j] = Hyperslab{w.x, w.y_re, cfg_.eps};
        slabs_im[j] = Hyperslab{w.x, w.y_im, cfg_.eps};
        atom_indices[j] = w.atom_index;
        folds[j] = w.fold;
        for (std::size_t i = 0; i <= j; ++i) {
            const double v = kernel_eval(cfg_.kernel, window_[i].x, w.x);
            slab_gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            slab_gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }

    rep.m_real = apply_projection_batch(dict_, re_, slabs_re, weights, atom_indices, folds,
                                        slab_gram, cfg_.mu);
    rep.m_imag = apply_projection_batch(dict_, im_, slabs_im, weights, atom_indices, folds,
                                        slab_gram, cfg_.mu);
    return rep;
}

}  // namespace kapsm
