#pragma once

#include "xpa/types.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <span>

namespace xpa::leaning {

using HashtagSet = std::vector<std::string>; // sorted, unique
using SparseMatrix = Eigen::SparseMatrix<double>;

// Binary entropy in bits, 0 log 0 = 0.
double binary_entropy(double p);

struct HashtagLists
{
    std::vector<std::string> left;  // seeds plus accepted expansions, sorted
    std::vector<std::string> right;
};

struct ExpansionCandidate
{
    std::string hashtag;
    std::size_t left_cooc = 0;  // profiles containing the tag and a left seed
    std::size_t right_cooc = 0;
    std::size_t any_cooc = 0;   // profiles containing the tag and any seed
    double entropy = 1;
    bool accepted = false;
};

HashtagLists expand_hashtags(std::span<const HashtagSet> profiles, const std::vector<std::string>& seeds_left,
                             const std::vector<std::string>& seeds_right, double cooc_min = 0.001,
                             double entropy_max = 0.1, std::vector<ExpansionCandidate>* candidates = nullptr);

enum class SeedLabel : std::int8_t
{
    None = -1,
    Liberal = 0,
    Conservative = 1
};

// One label per profile; a side wins when its share of the user's political
// hashtags is >= ratio_min.
std::vector<SeedLabel> assign_seed_users(std::span<const HashtagSet> profiles, const HashtagLists& lists,
                                         double ratio_min = 0.9);

// Symmetric weighted adjacency, w(u,v) = Jaccard of follower sets; zero weights
// are not stored and the diagonal is empty. Follower sets must be sorted and unique.
SparseMatrix shared_audience_graph(std::span<const std::vector<std::string>> follower_sets);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct DisparityEdge
{
    Eigen::Index u = 0; // u < v
    Eigen::Index v = 0;
    double weight = 0;
    double p_u = 1; // (1 - w/s_u)^(k_u - 1)
    double p_v = 1;
    bool kept = false;
};

// Every undirected edge with both endpoint p-values; kept if either is < alpha
// or either endpoint has degree 1.
std::vector<DisparityEdge> disparity_edges(const SparseMatrix& w, double alpha = 0.05);

SparseMatrix disparity_filter(const SparseMatrix& w, double alpha = 0.05);

struct LeaningScore
{
    double liberal_mass = 0;
    double conservative_mass = 0;
    double score = 0.5; // conservative / (liberal + conservative)
};

// score of a pair of masses; swapping the masses reflects the score exactly.
double mass_score(double liberal, double conservative);

struct PropagationOptions
{
    double beta = 0.85;
    double tol = 1e-8;
    int max_iter = 1000;
};

struct PropagationResult
{
    std::vector<LeaningScore> scores;
    Matrix masses; // n x 2, columns (liberal, conservative)
    int iterations = 0;
};

// F <- beta S F + (1 - beta) Y with S = D^-1/2 W D^-1/2. Throws ConvergenceError
// when max_iter is reached.
PropagationResult label_propagation(const SparseMatrix& w, std::span<const SeedLabel> seeds,
                                    const PropagationOptions& opts = {});

struct ClassMetrics
{
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

struct CrossValidation
{
    ClassMetrics liberal;
    ClassMetrics conservative;
    std::size_t unassigned = 0; // hidden seeds scoring exactly 0.5
};

// Stratified k-fold: each fold's seeds are hidden, scored from the others, and
// classified at 0.5. Metrics pool all folds.
CrossValidation crossvalidate_seeds(const SparseMatrix& w, std::span<const SeedLabel> seeds, int folds = 10,
                                    std::uint64_t seed = 7, const PropagationOptions& opts = {});

// Mean of adopter scores; nullopt when there are none.
MaybeMetric video_leaning_score(std::span<const double> adopter_scores);

struct LeaningThresholds
{
    double thr_lc = 1.0 / 3;
    double thr_cr = 2.0 / 3;
};

// Tukey-fence outlier removal (1.5 IQR), returned sorted.
std::vector<double> remove_outliers(std::vector<double> values);

// Gaussian KDE with Silverman's bandwidth 0.9 min(sd, IQR/1.34) n^-1/5.
class Kde
{
public:
    explicit Kde(std::vector<double> sample);
    double operator()(double x) const;
    double bandwidth() const { return h_; }
    std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
    double h_ = 0;
};

LeaningThresholds find_thresholds(const std::vector<double>& left, const std::vector<double>& center,
                                  const std::vector<double>& right);

Leaning classify_video(double score, const LeaningThresholds& thr);

UserClass classify_user(double score, double lib_max = 1.0 / 3, double con_min = 2.0 / 3);

} // namespace xpa::leaning
