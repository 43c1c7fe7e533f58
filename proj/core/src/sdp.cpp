#include "tdc/sdp.hpp"

#include <algorithm>
#include <future>
#include <cmath>
#include <limits>
#include <memory>

#include "tdc/dde.hpp"
#include "tdc/errors.hpp"

namespace tdc {

std::vector<double> default_lambda_grid() { return {0.5, 0.05, 5.0, 50.0, 10.0, 20.0, 30.0, 0.005, 2.0, 1.0, 0.0, -0.005, -0.05, -0.5, -5.0, -50.0}; }

const char* to_string(Status s) {
    switch (s) {
        case Status::Feasible: return "feasible";
        case Status::NotFound: return "not_found";
        case Status::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

const Mat& Verdict::gain(const std::string& name) const {
    for (const auto& [n, m] : gains) {
        if (n == name) return m;
    }
    throw Error(ErrorKind::InvalidInput, "verdict has no gain named " + name);
}

namespace {

struct Entry {
    int r;
    int c;
    double v;
};

// One semidefinite block of Z = C - sum_i y_i A_i.
struct Block {
    Index size = 0;
    Mat C;
    std::vector<std::vector<Entry>> A;  // indexed by dual variable
    std::vector<Index> active;          // variables with a nonempty A_i

    Mat X, Z, Zinv;
};

// Scalar rows of the box: z_l = c_l - a_l y_{var_l}.
struct LpRow {
    Index var;
    double a;
    double c;
};

double dot(const std::vector<Entry>& a, const Mat& w) {
    double s = 0.0;
    for (const auto& e : a) s += e.v * w(e.c, e.r);
    return s;
}

// Largest alpha with M + alpha D still positive definite (infinity if unbounded).
double max_step(const Mat& M, const Mat& D) {
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) return 0.0;
    const Mat L = llt.matrixL();
    Mat S = L.triangularView<Eigen::Lower>().solve(D);
    S = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
    S = 0.5 * (S + S.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Mat>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
    return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

Mat inverse_spd(const Mat& M) {
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::Internal, "sdp: lost positive definiteness");
    Mat inv = llt.solve(Mat::Identity(M.rows(), M.cols()));
    return 0.5 * (inv + inv.transpose());
}

class Engine {
public:
    Engine(const LmiProblem& p, const SolverConfig& cfg) : m_(p.decisions()), ny_(m_ + 1), box_(cfg.box) {
        for (const auto& con : p.constraints()) {
            Block b;
            b.size = con.map.rows();
            const double sign = con.sense == Sense::Negative ? -1.0 : 1.0;
            b.C = sign * con.map.offset();
            b.C = 0.5 * (b.C + b.C.transpose());
            b.A.assign(static_cast<size_t>(ny_), {});
            for (const auto& [k, coeff] : con.map.terms()) {
                auto& list = b.A[static_cast<size_t>(k)];
                for (Index j = 0; j < coeff.cols(); ++j) {
                    for (Index i = 0; i < coeff.rows(); ++i) {
                        const double v = 0.5 * (coeff(i, j) + coeff(j, i));
                        if (v != 0.0) list.push_back({static_cast<int>(i), static_cast<int>(j), -sign * v});
                    }
                }
            }
            auto& tl = b.A[static_cast<size_t>(m_)];
            for (Index i = 0; i < b.size; ++i) tl.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
            for (Index k = 0; k < ny_; ++k) {
                if (!b.A[static_cast<size_t>(k)].empty()) b.active.push_back(k);
            }
            blocks_.push_back(std::move(b));
        }
        for (Index k = 0; k < m_; ++k) {
            lp_.push_back({k, 1.0, box_});
            lp_.push_back({k, -1.0, box_});
        }
        total_ = static_cast<double>(lp_.size());
        for (const auto& b : blocks_) total_ += static_cast<double>(b.size);
    }

    // Returns the final status; fills y and the iteration count.
    Status run(const LmiProblem& p, const SolverConfig& cfg, double eps, Vec& x_out, double& t_out, int& iters,
               std::string& detail) {
        y_ = Vec::Zero(ny_);
        double c_min = 0.0;
        for (const auto& b : blocks_) {
            if (b.size > 0) c_min = std::min(c_min, min_eig_sym(b.C));
        }
        y_(m_) = c_min - 1.0;
        for (auto& b : blocks_) b.X = Mat::Identity(b.size, b.size);
        lx_ = Vec::Ones(static_cast<Index>(lp_.size()));
        update_dual();

        int stalls = 0;
        for (iters = 0;; ++iters) {
            const double t = y_(m_);
            const Vec x = y_.head(m_);
            if (t >= eps && !cfg.optimize) {
                const double margin = p.margin(x);
                if (margin >= 0.5 * eps) {
                    x_out = x;
                    t_out = t;
                    return Status::Feasible;
                }
            }
            const double pobj = primal_objective();
            const double res = primal_residual().norm();
            const double gap = pobj - t;
            if (!cfg.optimize && res <= cfg.tolerance * 10.0 && pobj < eps) {
                detail = "primal bound " + std::to_string(pobj) + " below margin";
                x_out = x;
                t_out = t;
                return Status::NotFound;
            }
            if (res <= cfg.tolerance && std::abs(gap) <= cfg.tolerance * (1.0 + std::abs(pobj) + std::abs(t))) {
                x_out = x;
                t_out = t;
                if (t >= eps && p.margin(x) >= 0.5 * eps) return Status::Feasible;
                detail = "converged with t* = " + std::to_string(t);
                return Status::NotFound;
            }
            if (iters >= cfg.max_iterations) break;
            double step = 0.0;
            if (!iterate(step)) {
                detail = "numerical breakdown";
                break;
            }
            stalls = step < 1e-8 ? stalls + 1 : 0;
            if (stalls >= 5) {
                detail = "no progress";
                break;
            }
        }
        x_out = y_.head(m_);
        t_out = y_(m_);
        if (detail.empty()) detail = "iteration budget exhausted";
        return Status::Inconclusive;
    }

private:
    void update_dual() {
        for (auto& b : blocks_) {
            b.Z = b.C;
            for (Index k : b.active) {
                const double yk = y_(k);
                if (yk == 0.0) continue;
                for (const auto& e : b.A[static_cast<size_t>(k)]) b.Z(e.r, e.c) -= yk * e.v;
            }
        }
        lz_.resize(static_cast<Index>(lp_.size()));
        for (size_t l = 0; l < lp_.size(); ++l) lz_(static_cast<Index>(l)) = lp_[l].c - lp_[l].a * y_(lp_[l].var);
    }

    double primal_objective() const {
        double s = 0.0;
        for (const auto& b : blocks_) s += (b.C.cwiseProduct(b.X)).sum();
        for (size_t l = 0; l < lp_.size(); ++l) s += lp_[l].c * lx_(static_cast<Index>(l));
        return s;
    }

    Vec apply_adjoint(const std::vector<Mat>& w_blocks, const Vec& w_lp) const {
        Vec out = Vec::Zero(ny_);
        for (size_t bi = 0; bi < blocks_.size(); ++bi) {
            const auto& b = blocks_[bi];
            for (Index k : b.active) out(k) += dot(b.A[static_cast<size_t>(k)], w_blocks[bi]);
        }
        for (size_t l = 0; l < lp_.size(); ++l) out(lp_[l].var) += lp_[l].a * w_lp(static_cast<Index>(l));
        return out;
    }

    Vec primal_residual() const {
        std::vector<Mat> xs;
        for (const auto& b : blocks_) xs.push_back(b.X);
        Vec r = -apply_adjoint(xs, lx_);
        r(m_) += 1.0;
        return r;
    }

    Mat schur() const {
        Mat M = Mat::Zero(ny_, ny_);
        for (const auto& b : blocks_) {
            const Index s = b.size;
            for (size_t ii = 0; ii < b.active.size(); ++ii) {
                const Index i = b.active[ii];
                const auto& ai = b.A[static_cast<size_t>(i)];
                Mat xa = Mat::Zero(s, s);
                std::vector<char> used(static_cast<size_t>(s), 0);
                for (const auto& e : ai) {
                    xa.col(e.c) += e.v * b.X.col(e.r);
                    used[static_cast<size_t>(e.c)] = 1;
                }
                Mat w = Mat::Zero(s, s);
                for (Index c = 0; c < s; ++c) {
                    if (used[static_cast<size_t>(c)]) w.noalias() += xa.col(c) * b.Zinv.row(c);
                }
                for (size_t jj = ii; jj < b.active.size(); ++jj) {
                    const Index j = b.active[jj];
                    M(j, i) += dot(b.A[static_cast<size_t>(j)], w);
                }
            }
        }
        for (size_t l = 0; l < lp_.size(); ++l) {
            const Index k = lp_[l].var;
            M(k, k) += lp_[l].a * lp_[l].a * lx_(static_cast<Index>(l)) / lz_(static_cast<Index>(l));
        }
        return M.selfadjointView<Eigen::Lower>();
    }

    struct Direction {
        Vec dy;
        std::vector<Mat> dX, dZ;
        Vec dlx, dlz;
    };

    // Solves for a direction with complementarity target sigma*mu and an
    // optional second-order correction from a predictor direction.
    Direction direction(const Eigen::LDLT<Mat>& ldlt, double sigma_mu, const Direction* pred) const {
        std::vector<Mat> wz;
        for (size_t bi = 0; bi < blocks_.size(); ++bi) {
            const auto& b = blocks_[bi];
            Mat w = sigma_mu * b.Zinv;
            if (pred) w -= pred->dX[bi] * pred->dZ[bi] * b.Zinv;
            wz.push_back(std::move(w));
        }
        Vec wl(static_cast<Index>(lp_.size()));
        for (Index l = 0; l < wl.size(); ++l) {
            wl(l) = sigma_mu / lz_(l);
            if (pred) wl(l) -= pred->dlx(l) * pred->dlz(l) / lz_(l);
        }
        Vec rhs = -apply_adjoint(wz, wl);
        rhs(m_) += 1.0;

        Direction d;
        d.dy = ldlt.solve(rhs);
        for (size_t bi = 0; bi < blocks_.size(); ++bi) {
            const auto& b = blocks_[bi];
            Mat dz = Mat::Zero(b.size, b.size);
            for (Index k : b.active) {
                const double v = d.dy(k);
                if (v == 0.0) continue;
                for (const auto& e : b.A[static_cast<size_t>(k)]) dz(e.r, e.c) -= v * e.v;
            }
            Mat dx = wz[bi] - b.X - b.X * dz * b.Zinv;
            d.dX.push_back(0.5 * (dx + dx.transpose()));
            d.dZ.push_back(std::move(dz));
        }
        d.dlz.resize(wl.size());
        d.dlx.resize(wl.size());
        for (size_t l = 0; l < lp_.size(); ++l) {
            const auto li = static_cast<Index>(l);
            d.dlz(li) = -lp_[l].a * d.dy(lp_[l].var);
            d.dlx(li) = wl(li) - lx_(li) - lx_(li) * d.dlz(li) / lz_(li);
        }
        return d;
    }

    std::pair<double, double> steps(const Direction& d) const {
        double ap = std::numeric_limits<double>::infinity();
        double ad = ap;
        for (size_t bi = 0; bi < blocks_.size(); ++bi) {
            ap = std::min(ap, max_step(blocks_[bi].X, d.dX[bi]));
            ad = std::min(ad, max_step(blocks_[bi].Z, d.dZ[bi]));
        }
        for (Index l = 0; l < lx_.size(); ++l) {
            if (d.dlx(l) < 0.0) ap = std::min(ap, -lx_(l) / d.dlx(l));
            if (d.dlz(l) < 0.0) ad = std::min(ad, -lz_(l) / d.dlz(l));
        }
        return {ap, ad};
    }

    double complementarity(const Direction* d, double ap, double ad) const {
        double s = 0.0;
        for (size_t bi = 0; bi < blocks_.size(); ++bi) {
            const auto& b = blocks_[bi];
            if (d) {
                s += ((b.X + ap * d->dX[bi]).cwiseProduct(b.Z + ad * d->dZ[bi])).sum();
            } else {
                s += (b.X.cwiseProduct(b.Z)).sum();
            }
        }
        for (Index l = 0; l < lx_.size(); ++l) {
            s += d ? (lx_(l) + ap * d->dlx(l)) * (lz_(l) + ad * d->dlz(l)) : lx_(l) * lz_(l);
        }
        return s / total_;
    }

    bool iterate(double& step) {
        try {
            for (auto& b : blocks_) b.Zinv = inverse_spd(b.Z);
        } catch (const Error&) {
            return false;
        }
        Mat M = schur();
        const double reg = 1e-14 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
        M.diagonal().array() += reg;
        const Eigen::LDLT<Mat> ldlt(M);
        if (ldlt.info() != Eigen::Success) return false;

        const double mu = complementarity(nullptr, 0.0, 0.0);
        const Direction pred = direction(ldlt, 0.0, nullptr);
        auto [ap, ad] = steps(pred);
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);
        const double mu_aff = complementarity(&pred, ap, ad);
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        const Direction d = direction(ldlt, sigma * mu, &pred);
        auto [sp, sd] = steps(d);
        sp = std::min(1.0, 0.95 * sp);
        sd = std::min(1.0, 0.95 * sd);
        if (!d.dy.allFinite()) return false;

        for (size_t bi = 0; bi < blocks_.size(); ++bi) blocks_[bi].X += sp * d.dX[bi];
        lx_ += sp * d.dlx;
        y_ += sd * d.dy;
        update_dual();
        step = std::max(sp, sd);
        return true;
    }

    Index m_;
    Index ny_;
    double box_;
    double total_ = 0.0;
    std::vector<Block> blocks_;
    std::vector<LpRow> lp_;
    Vec y_;
    Vec lx_, lz_;
};

double epsilon_for(const LmiProblem& p, const SolverConfig& cfg) {
    return cfg.feasibility_margin > 0.0 ? cfg.feasibility_margin : p.strictness();
}

} // namespace

Verdict solve(const LmiProblem& problem, const SolverConfig& cfg) {
    if (cfg.max_iterations < 0 || !(cfg.box > 0.0) || !(cfg.tolerance > 0.0)) {
        throw Error(ErrorKind::Configuration, "solver configuration out of range");
    }
    if (problem.constraints().empty()) throw Error(ErrorKind::InvalidInput, "LMI problem has no constraints");
    Verdict v;
    v.kind = problem.kind;
    v.epsilon = epsilon_for(problem, cfg);
    Engine engine(problem, cfg);
    v.status = engine.run(problem, cfg, v.epsilon, v.x, v.objective, v.iterations, v.detail);
    v.margin = problem.margin(v.x);
    if (v.status == Status::Feasible) v.assignment = problem.assignment(v.x);
    return v;
}

namespace {

double closed_loop_abscissa(const SynthesisInfo& info, const std::vector<Mat>& gains) {
    auto one = [&](std::optional<double> tau) {
        const auto [a0, delayed] = closed_loop_matrices(info, gains, tau);
        std::vector<DelayTerm> terms;
        for (const auto& [m, d] : delayed) terms.push_back({m, d});
        return rightmost_roots(DdeSystem::merged(a0, std::move(terms))).abscissa;
    };
    if (!info.interval) return one(std::nullopt);
    const auto [lo, hi] = *info.interval;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4; ++i) worst = std::max(worst, one(lo + (hi - lo) * i / 4.0));
    return worst;
}

} // namespace

Verdict solve_synthesis(const LmiProblem& problem, const SolverConfig& cfg) {
    if (!problem.synthesis) throw Error(ErrorKind::Configuration, "solve_synthesis: not a stabilization problem");
    const SynthesisInfo& info = *problem.synthesis;
    Verdict v = solve(problem, cfg);
    v.lambda = info.lambda;
    if (!v.feasible()) return v;

    const Mat& X = v.assignment.at(info.x_name);
    const double cond = condition_estimate(X);
    if (!(cond <= cfg.max_condition)) {
        v.status = Status::NotFound;
        v.detail = "X too ill-conditioned for gain extraction (cond " + std::to_string(cond) + ")";
        return v;
    }
    std::vector<Mat> gains;
    try {
        for (size_t i = 0; i < info.g_names.size(); ++i) {
            gains.push_back(tdc::solve(X, v.assignment.at(info.g_names[i])));
            v.gains.emplace_back(info.gain_names[i], gains.back());
        }
    } catch (const SingularMatrixError& e) {
        v.status = Status::NotFound;
        v.detail = std::string("gain extraction failed: ") + e.what();
        return v;
    }

    v.closed_loop_abscissa = closed_loop_abscissa(info, gains);
    if (!(*v.closed_loop_abscissa < 0.0)) {
        v.status = Status::NotFound;
        v.detail = "extracted gains fail the root check (abscissa " + std::to_string(*v.closed_loop_abscissa) + ")";
        return v;
    }
    const Verdict check = solve(closed_loop_stability_problem(info, gains), cfg);
    v.closed_loop_margin = check.margin;
    if (!check.feasible()) {
        v.status = check.status == Status::Inconclusive ? Status::Inconclusive : Status::NotFound;
        v.detail = "closed-loop stability condition not certified (" + check.detail + ")";
    }
    return v;
}

Verdict solve_synthesis(const LambdaFamily& family, const SolverConfig& cfg, std::optional<double> first) {
    if (cfg.lambda_grid.empty()) throw Error(ErrorKind::Configuration, "lambda grid is empty");
    std::vector<double> order = cfg.lambda_grid;
    if (first) {
        auto it = std::find(order.begin(), order.end(), *first);
        if (it != order.end()) std::rotate(order.begin(), it, it + 1);
    }
    Verdict last;
    bool inconclusive = false;
    for (double lambda : order) {
        Verdict v = solve_synthesis(family(lambda), cfg);
        if (v.feasible()) return v;
        inconclusive = inconclusive || v.status == Status::Inconclusive;
        last = std::move(v);
    }
    last.status = inconclusive ? Status::Inconclusive : Status::NotFound;
    last.detail = "no lambda on the grid gave verified gains; last: " + last.detail;
    last.lambda.reset();
    return last;
}

DelaySweepResult max_delay(const DelayProbe& probe, double lo, double hi, double tol, std::string query) {
    if (!(tol > 0.0) || !(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::Configuration, "max_delay: bad range or tol");
    DelaySweepResult out;
    out.query = std::move(query);
    auto record = [&](double tau) {
        Verdict v = probe(tau);
        out.trace.emplace_back(tau, v.status);
        out.inconclusive_seen = out.inconclusive_seen || v.status == Status::Inconclusive;
        return v;
    };
    Verdict v = record(lo);
    if (!v.feasible()) {
        throw Error(ErrorKind::NoFeasibleStart, "max_delay: not feasible at the lower end " + std::to_string(lo));
    }
    out.best = std::move(v);
    double a = lo;
    double b = hi;
    Verdict top = record(hi);
    if (top.feasible()) {
        out.best = std::move(top);
        out.certified_max_delay = hi;
        return out;
    }
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        Verdict m = record(mid);
        if (m.feasible()) {
            a = mid;
            out.best = std::move(m);
        } else {
            b = mid;
        }
    }
    out.certified_max_delay = a;
    return out;
}

DelaySweepResult max_delay_sweep(const DelayProbe& probe, const std::vector<double>& grid, double tol,
                                 std::string query) {
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) || !(tol > 0.0)) {
        throw Error(ErrorKind::Configuration, "max_delay_sweep: grid must be ascending and nonempty");
    }
    DelaySweepResult out;
    out.query = std::move(query);
    std::optional<size_t> last;
    std::vector<Verdict> verdicts;
    for (size_t i = 0; i < grid.size(); ++i) {
        Verdict v = probe(grid[i]);
        out.trace.emplace_back(grid[i], v.status);
        out.inconclusive_seen = out.inconclusive_seen || v.status == Status::Inconclusive;
        if (v.feasible()) last = i;
        verdicts.push_back(std::move(v));
    }
    if (!last) throw Error(ErrorKind::NoFeasibleStart, "max_delay_sweep: no grid point is feasible");
    out.best = verdicts[*last];
    double a = grid[*last];
    out.certified_max_delay = a;
    if (*last + 1 == grid.size()) return out;
    double b = grid[*last + 1];
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        Verdict v = probe(mid);
        out.trace.emplace_back(mid, v.status);
        out.inconclusive_seen = out.inconclusive_seen || v.status == Status::Inconclusive;
        if (v.feasible()) {
            a = mid;
            out.best = std::move(v);
        } else {
            b = mid;
        }
    }
    out.certified_max_delay = a;
    return out;
}

DelaySweepResult max_delay_sweep(const ProbeFactory& make, const std::vector<double>& grid, double tol,
                                 std::string query, unsigned jobs) {
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) || !(tol > 0.0)) {
        throw Error(ErrorKind::Configuration, "max_delay_sweep: grid must be ascending and nonempty");
    }
    jobs = std::max(1u, jobs);
    std::vector<Verdict> verdicts(grid.size());
    for (size_t start = 0; start < grid.size(); start += jobs) {
        const size_t stop = std::min(grid.size(), start + jobs);
        std::vector<std::future<Verdict>> batch;
        for (size_t i = start; i < stop; ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       [&make, tau = grid[i]] { return make()(tau); }));
        }
        for (size_t i = start; i < stop; ++i) verdicts[i] = batch[i - start].get();
    }
    DelayProbe bisect = make();
    size_t next = 0;
    auto probe = [&](double tau) { return next < verdicts.size() ? verdicts[next++] : bisect(tau); };
    return max_delay_sweep(probe, grid, tol, std::move(query));
}

DelayProbe analysis_probe(std::function<LmiProblem(double)> family, SolverConfig cfg) {
    return [family = std::move(family), cfg = std::move(cfg)](double tau) { return solve(family(tau), cfg); };
}

DelayProbe synthesis_probe(std::function<LmiProblem(double, double)> family, SolverConfig cfg) {
    auto remembered = std::make_shared<std::optional<double>>();
    return [family = std::move(family), cfg = std::move(cfg), remembered](double tau) {
        Verdict v = solve_synthesis([&](double lambda) { return family(tau, lambda); }, cfg, *remembered);
        if (v.feasible()) *remembered = v.lambda;
        return v;
    };
}

} // namespace tdc
