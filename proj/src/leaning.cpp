#include "xpa/leaning.hpp"

#include "xpa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>

namespace xpa::leaning {

double binary_entropy(double p)
{
    if (!(p >= 0 && p <= 1))
        throw DomainError("binary_entropy: p must lie in [0, 1]");
    auto term = [](double q) { return q > 0 ? -q * std::log2(q) : 0.0; };
    return term(p) + term(1 - p);
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

HashtagLists expand_hashtags(std::span<const HashtagSet> profiles, const std::vector<std::string>& seeds_left,
                             const std::vector<std::string>& seeds_right, double cooc_min, double entropy_max,
                             std::vector<ExpansionCandidate>* candidates)
{
    if (seeds_left.empty() || seeds_right.empty())
        throw DomainError("expand_hashtags: seed lists must be nonempty");
    const auto left = sorted_unique(seeds_left);
    const auto right = sorted_unique(seeds_right);
    for (const auto& t : left)
        if (std::binary_search(right.begin(), right.end(), t))
            throw DomainError("expand_hashtags: hashtag '" + t + "' is in both seed lists");

    std::unordered_map<std::string, ExpansionCandidate> stats;
    for (const auto& prof : profiles) {
        bool has_l = false, has_r = false;
        for (const auto& t : prof) {
            has_l = has_l || std::binary_search(left.begin(), left.end(), t);
            has_r = has_r || std::binary_search(right.begin(), right.end(), t);
        }
        if (!has_l && !has_r)
            continue;
        for (const auto& t : prof) {
            if (std::binary_search(left.begin(), left.end(), t) || std::binary_search(right.begin(), right.end(), t))
                continue;
            auto& c = stats[t];
            c.hashtag = t;
            c.left_cooc += has_l;
            c.right_cooc += has_r;
            ++c.any_cooc;
        }
    }

    HashtagLists out{left, right};
    std::vector<ExpansionCandidate> all;
    all.reserve(stats.size());
    const double need = cooc_min * static_cast<double>(profiles.size());
    for (auto& [tag, c] : stats) {
        const double p = static_cast<double>(c.left_cooc) / static_cast<double>(c.left_cooc + c.right_cooc);
        c.entropy = binary_entropy(p);
        c.accepted = static_cast<double>(c.any_cooc) >= need && c.entropy <= entropy_max &&
                     c.left_cooc != c.right_cooc;
        if (c.accepted)
            (c.left_cooc > c.right_cooc ? out.left : out.right).push_back(tag);
        all.push_back(c);
    }
    out.left = sorted_unique(std::move(out.left));
    out.right = sorted_unique(std::move(out.right));
    if (candidates) {
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.hashtag < b.hashtag; });
        *candidates = std::move(all);
    }
    return out;
}

std::vector<SeedLabel> assign_seed_users(std::span<const HashtagSet> profiles, const HashtagLists& lists,
                                         double ratio_min)
{
    std::vector<SeedLabel> out;
    out.reserve(profiles.size());
    for (const auto& prof : profiles) {
        std::size_t l = 0, r = 0;
        for (const auto& t : prof) {
            l += std::binary_search(lists.left.begin(), lists.left.end(), t);
            r += std::binary_search(lists.right.begin(), lists.right.end(), t);
        }
        SeedLabel lab = SeedLabel::None;
        if (l + r > 0) {
            const double tot = static_cast<double>(l + r);
            if (static_cast<double>(l) / tot >= ratio_min)
                lab = SeedLabel::Liberal;
            else if (static_cast<double>(r) / tot >= ratio_min)
                lab = SeedLabel::Conservative;
        }
        out.push_back(lab);
    }
    return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::size_t inter = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

SparseMatrix shared_audience_graph(std::span<const std::vector<std::string>> follower_sets)
{
    const auto n = follower_sets.size();
    std::unordered_map<std::string, std::size_t> fid;
    std::vector<std::vector<std::size_t>> by_follower;
    for (std::size_t u = 0; u < n; ++u)
        for (const auto& f : follower_sets[u]) {
            auto [it, fresh] = fid.emplace(f, by_follower.size());
            if (fresh)
                by_follower.emplace_back();
            by_follower[it->second].push_back(u);
        }
    std::vector<std::size_t> count(n, 0), touched;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t u = 0; u < n; ++u) {
        touched.clear();
        for (const auto& f : follower_sets[u])
            for (auto v : by_follower[fid.at(f)])
                if (v > u && count[v]++ == 0)
                    touched.push_back(v);
        for (auto v : touched) {
            const auto inter = count[v];
            const double w = static_cast<double>(inter) /
                             static_cast<double>(follower_sets[u].size() + follower_sets[v].size() - inter);
            const auto iu = static_cast<Eigen::Index>(u), iv = static_cast<Eigen::Index>(v);
            trip.emplace_back(iu, iv, w);
            trip.emplace_back(iv, iu, w);
            count[v] = 0;
        }
    }
    SparseMatrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    g.setFromTriplets(trip.begin(), trip.end());
    return g;
}

std::vector<DisparityEdge> disparity_edges(const SparseMatrix& w, double alpha)
{
    if (w.rows() != w.cols())
        throw DomainError("disparity_edges: adjacency must be square");
    const auto n = w.rows();
    Vector strength = Vector::Zero(n);
    std::vector<std::size_t> degree(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k = 0; k < w.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(w, k); it; ++it)
            if (it.row() != it.col() && it.value() > 0) {
                strength[it.col()] += it.value();
                ++degree[static_cast<std::size_t>(it.col())];
            }
    auto pval = [&](Eigen::Index node, double weight) {
        const auto k = degree[static_cast<std::size_t>(node)];
        return std::pow(1 - weight / strength[node], static_cast<double>(k) - 1);
    };
    std::vector<DisparityEdge> out;
    for (Eigen::Index k = 0; k < w.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(w, k); it; ++it) {
            if (!(it.row() < it.col()) || !(it.value() > 0))
                continue;
            DisparityEdge e;
            e.u = it.row();
            e.v = it.col();
            e.weight = it.value();
            e.p_u = pval(e.u, e.weight);
            e.p_v = pval(e.v, e.weight);
            e.kept = e.p_u < alpha || e.p_v < alpha || degree[static_cast<std::size_t>(e.u)] == 1 ||
                     degree[static_cast<std::size_t>(e.v)] == 1;
            out.push_back(e);
        }
    return out;
}

SparseMatrix disparity_filter(const SparseMatrix& w, double alpha)
{
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& e : disparity_edges(w, alpha))
        if (e.kept) {
            trip.emplace_back(e.u, e.v, e.weight);
            trip.emplace_back(e.v, e.u, e.weight);
        }
    SparseMatrix b(w.rows(), w.cols());
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

double mass_score(double liberal, double conservative)
{
    const double total = liberal + conservative;
    if (!(total > 0))
        return 0.5;
    // q >= 0.5 always; 1 - q is exact, so swapping the inputs gives 1 - score bit for bit
    const double q = 1 - std::min(liberal, conservative) / total;
    return conservative >= liberal ? q : 1 - q;
}

PropagationResult label_propagation(const SparseMatrix& w, std::span<const SeedLabel> seeds,
                                    const PropagationOptions& opts)
{
    const auto n = w.rows();
    if (w.cols() != n || static_cast<Eigen::Index>(seeds.size()) != n)
        throw DomainError("label_propagation: graph and seed vector sizes differ");
    if (!(opts.beta > 0 && opts.beta < 1))
        throw DomainError("label_propagation: beta must lie in (0, 1)");
    Vector dinv = Vector::Zero(n);
    const Vector deg = w * Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i)
        dinv[i] = deg[i] > 0 ? 1 / std::sqrt(deg[i]) : 0.0;
    const SparseMatrix S = dinv.asDiagonal() * w * dinv.asDiagonal();

    Vector yl = Vector::Zero(n), yc = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (seeds[static_cast<std::size_t>(i)] == SeedLabel::Liberal)
            yl[i] = 1;
        else if (seeds[static_cast<std::size_t>(i)] == SeedLabel::Conservative)
            yc[i] = 1;
    }
    const double keep = 1 - opts.beta;
    Vector fl = keep * yl, fc = keep * yc;
    PropagationResult res;
    double change = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < opts.max_iter) {
        Vector nl = opts.beta * (S * fl) + keep * yl;
        Vector nc = opts.beta * (S * fc) + keep * yc;
        change = std::max(n ? (nl - fl).cwiseAbs().maxCoeff() : 0.0, n ? (nc - fc).cwiseAbs().maxCoeff() : 0.0);
        fl = std::move(nl);
        fc = std::move(nc);
        ++it;
        if (change < opts.tol)
            break;
    }
    if (!(change < opts.tol))
        throw ConvergenceError("label_propagation: no convergence after " + std::to_string(opts.max_iter) +
                                   " iterations",
                               change);
    res.iterations = it;
    res.masses.resize(n, 2);
    res.masses.col(0) = fl;
    res.masses.col(1) = fc;
    res.scores.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& s = res.scores[static_cast<std::size_t>(i)];
        s.liberal_mass = fl[i];
        s.conservative_mass = fc[i];
        s.score = mass_score(fl[i], fc[i]);
    }
    return res;
}

namespace {

ClassMetrics metrics(std::size_t tp, std::size_t predicted, std::size_t actual)
{
    ClassMetrics m;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

} // namespace

CrossValidation crossvalidate_seeds(const SparseMatrix& w, std::span<const SeedLabel> seeds, int folds,
                                    std::uint64_t seed, const PropagationOptions& opts)
{
    if (folds < 2)
        throw DomainError("crossvalidate_seeds: need at least two folds");
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (seeds[i] != SeedLabel::None)
            members[static_cast<std::size_t>(seeds[i])].push_back(i);
    for (const auto& m : members)
        if (m.size() < static_cast<std::size_t>(folds))
            throw DomainError("crossvalidate_seeds: each class needs at least as many seeds as folds");

    std::mt19937_64 rng(seed);
    std::vector<int> fold_of(seeds.size(), -1);
    for (auto& m : members) {
        std::shuffle(m.begin(), m.end(), rng);
        for (std::size_t k = 0; k < m.size(); ++k)
            fold_of[m[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }

    // counts indexed by class: true positives, predictions
    std::array<std::size_t, 2> tp{}, pred{};
    CrossValidation cv;
    std::vector<SeedLabel> train(seeds.begin(), seeds.end());
    for (int f = 0; f < folds; ++f) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            train[i] = fold_of[i] == f ? SeedLabel::None : seeds[i];
        const auto res = label_propagation(w, train, opts);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (fold_of[i] != f)
                continue;
            const double s = res.scores[i].score;
            if (s == 0.5) {
                ++cv.unassigned;
                continue;
            }
            const auto guess = static_cast<std::size_t>(s > 0.5 ? SeedLabel::Conservative : SeedLabel::Liberal);
            ++pred[guess];
            tp[guess] += guess == static_cast<std::size_t>(seeds[i]);
        }
    }
    cv.liberal = metrics(tp[0], pred[0], members[0].size());
    cv.conservative = metrics(tp[1], pred[1], members[1].size());
    return cv;
}

MaybeMetric video_leaning_score(std::span<const double> adopter_scores)
{
    if (adopter_scores.empty())
        return std::nullopt;
    double sum = 0;
    for (double s : adopter_scores)
        sum += s;
    return sum / static_cast<double>(adopter_scores.size());
}

std::vector<double> remove_outliers(std::vector<double> values)
{
    if (values.empty())
        return values;
    const double q1 = stats::quantile(values, 0.25);
    const double q3 = stats::quantile(values, 0.75);
    const double lo = q1 - 1.5 * (q3 - q1), hi = q3 + 1.5 * (q3 - q1);
    std::erase_if(values, [&](double v) { return v < lo || v > hi; });
    std::sort(values.begin(), values.end());
    return values;
}

Kde::Kde(std::vector<double> sample) : x_(std::move(sample))
{
    if (x_.size() < 2)
        throw DomainError("Kde: need at least two values");
    const double n = static_cast<double>(x_.size());
    const auto v = stats::view(x_);
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().sum() / (n - 1));
    const double iqr = stats::quantile(x_, 0.75) - stats::quantile(x_, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0))
        spread = sd;
    h_ = 0.9 * spread * std::pow(n, -0.2);
    if (!(h_ > 0))
        throw DomainError("Kde: sample has zero spread");
}

double Kde::operator()(double x) const
{
    double s = 0;
    for (double xi : x_) {
        const double z = (x - xi) / h_;
        s += std::exp(-0.5 * z * z);
    }
    return s / (static_cast<double>(x_.size()) * h_ * std::sqrt(2 * std::numbers::pi));
}

namespace {

double median_sorted(const std::vector<double>& v)
{
    return stats::quantile(v, 0.5);
}

double posterior_crossing(const Kde& a, double prior_a, double med_a, const Kde& b, double prior_b, double med_b,
                          const char* name)
{
    auto g = [&](double s) { return prior_a * a(s) - prior_b * b(s); };
    double lo = med_a, hi = med_b;
    if (!(lo < hi))
        throw DomainError(std::string("find_thresholds: no crossing for ") + name + " (medians not ordered)");
    double glo = g(lo), ghi = g(hi);
    if (!(glo > 0 && ghi < 0))
        throw DomainError(std::string("find_thresholds: no posterior crossing for ") + name);
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

LeaningThresholds find_thresholds(const std::vector<double>& left, const std::vector<double>& center,
                                  const std::vector<double>& right)
{
    const auto l = remove_outliers(left);
    const auto c = remove_outliers(center);
    const auto r = remove_outliers(right);
    if (l.size() < 3 || c.size() < 3 || r.size() < 3)
        throw DomainError("find_thresholds: each group needs >= 3 scores after outlier removal");
    const double total = static_cast<double>(l.size() + c.size() + r.size());
    const Kde kl(l), kc(c), kr(r);
    const double pl = static_cast<double>(l.size()) / total;
    const double pc = static_cast<double>(c.size()) / total;
    const double pr = static_cast<double>(r.size()) / total;
    LeaningThresholds t;
    t.thr_lc = posterior_crossing(kl, pl, median_sorted(l), kc, pc, median_sorted(c), "L/C");
    t.thr_cr = posterior_crossing(kc, pc, median_sorted(c), kr, pr, median_sorted(r), "C/R");
    if (!(t.thr_lc < t.thr_cr))
        throw DomainError("find_thresholds: thr_LC >= thr_CR");
    return t;
}

Leaning classify_video(double score, const LeaningThresholds& thr)
{
    if (score < thr.thr_lc)
        return Leaning::Left;
    if (score > thr.thr_cr)
        return Leaning::Right;
    return Leaning::Center;
}

UserClass classify_user(double score, double lib_max, double con_min)
{
    if (!(lib_max < con_min))
        throw DomainError("classify_user: lib_max must be below con_min");
    if (score < lib_max)
        return UserClass::Liberal;
    if (score > con_min)
        return UserClass::Conservative;
    return UserClass::Neutral;
}

} // namespace xpa::leaning
