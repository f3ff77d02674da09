#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

#include "hccepose/errors.hpp"
#include "hccepose/parallel.hpp"
#include "hccepose/pnp.hpp"
#include "hccepose/rng.hpp"

namespace hcce {

namespace {

constexpr std::uint64_t kIterationSalt = 0x52414e53ULL;  // stream tag

// Contiguous run of records sharing one pixel group.
struct GroupRun {
    std::int32_t group = 0;
    int begin = 0;
    int count = 0;
};

struct Candidate {
    Pose pose;
    int inlier_count = -1;  // -1 marks a degenerate / rejected iteration
    double mean_error = std::numeric_limits<double>::infinity();
    std::vector<std::int32_t> sample_groups;
};

// Robert Floyd's algorithm: k distinct values from [0, n).
std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = n - k; j < n; ++j) {
        std::uniform_int_distribution<int> dist(0, j);
        const int t = dist(rng);
        if (std::find(out.begin(), out.end(), t) == out.end()) {
            out.push_back(t);
        } else {
            out.push_back(j);
        }
    }
    return out;
}

struct Score {
    int inliers = 0;
    double mean_error = std::numeric_limits<double>::infinity();
};

Score score_pose(const Pose& pose, const CorrespondenceSet& set, const CameraIntrinsics& k,
                 const RansacConfig& cfg, std::vector<int>* inlier_records) {
    Score s;
    double inlier_sum = 0.0;
    double total_sum = 0.0;
    std::size_t scored = 0;
    bool any_behind = false;
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        const auto& rec = set.records[i];
        if (!cfg.score_all_sources && rec.source == SurfaceSource::Mid) continue;
        ++scored;
        const auto proj = try_project_camera(pose.apply(rec.point), k);
        if (!proj) {
            any_behind = true;
            continue;
        }
        const double err = (*proj - rec.pixel).norm();
        total_sum += err;
        if (err < cfg.threshold) {
            ++s.inliers;
            inlier_sum += err;
            if (inlier_records) inlier_records->push_back(static_cast<int>(i));
        }
    }
    if (cfg.scoring == RansacScoring::MeanError) {
        s.mean_error = (any_behind || scored == 0)
                           ? std::numeric_limits<double>::infinity()
                           : total_sum / static_cast<double>(scored);
    } else {
        s.mean_error = s.inliers > 0 ? inlier_sum / static_cast<double>(s.inliers)
                                     : std::numeric_limits<double>::infinity();
    }
    return s;
}

// Lexicographic preference; `a` strictly better than `b`.
bool better(const Score& a, const Score& b, RansacScoring scoring) {
    if (scoring == RansacScoring::MeanError) return a.mean_error < b.mean_error;
    if (a.inliers != b.inliers) return a.inliers > b.inliers;
    return a.mean_error < b.mean_error;
}

}  // namespace

void RansacConfig::validate() const {
    if (iterations < 1) throw DomainError("RansacConfig: iterations must be >= 1");
    if (!(threshold > 0.0)) throw DomainError("RansacConfig: threshold must be > 0");
    if (sample_size < 4) throw DomainError("RansacConfig: sample_size must be >= 4");
    if (threads < 1) throw DomainError("RansacConfig: threads must be >= 1");
}

PoseEstimate ransac_pnp(const CorrespondenceSet& set, const CameraIntrinsics& k,
                        const RansacConfig& cfg, const RansacObserver& observer) {
    cfg.validate();
    k.validate();

    // Records arrive grouped by pixel; collect the contiguous runs. A group id
    // recurring in a later run would defeat the one-point-per-pixel rule.
    std::vector<GroupRun> groups;
    std::unordered_set<std::int32_t> seen;
    for (std::size_t i = 0; i < set.records.size();) {
        const std::int32_t g = set.records[i].group;
        if (!seen.insert(g).second) {
            throw ShapeError("ransac_pnp: records of group " + std::to_string(g) +
                             " are not contiguous");
        }
        std::size_t j = i;
        while (j < set.records.size() && set.records[j].group == g) ++j;
        groups.push_back({g, static_cast<int>(i), static_cast<int>(j - i)});
        i = j;
    }
    const int group_count = static_cast<int>(groups.size());
    if (group_count < cfg.sample_size) {
        throw InsufficientDataError("ransac_pnp: " + std::to_string(group_count) +
                                    " distinct pixel groups, need " +
                                    std::to_string(cfg.sample_size));
    }

    std::vector<Candidate> candidates(static_cast<std::size_t>(cfg.iterations));

    parallel_for(static_cast<std::size_t>(cfg.iterations), cfg.threads, [&](std::size_t it) {
        std::mt19937_64 rng(derive_seed(cfg.seed, kIterationSalt, it));
        Candidate& cand = candidates[it];

        const std::vector<int> picks = sample_distinct(rng, group_count, cfg.sample_size);
        std::vector<PixelPointPair> sample;
        sample.reserve(picks.size());
        cand.sample_groups.reserve(picks.size());
        for (int gi : picks) {
            const GroupRun& run = groups[static_cast<std::size_t>(gi)];
            std::uniform_int_distribution<int> dist(0, run.count - 1);
            const auto& rec = set.records[static_cast<std::size_t>(run.begin + dist(rng))];
            sample.push_back({rec.pixel, rec.point});
            cand.sample_groups.push_back(rec.group);
        }
        // One 3D point per pixel: the sampled groups must be pairwise distinct.
        assert([&] {
            auto g = cand.sample_groups;
            std::sort(g.begin(), g.end());
            return std::adjacent_find(g.begin(), g.end()) == g.end();
        }());

        try {
            const Pose pose = epnp_solve(sample, k);
            const Score s = score_pose(pose, set, k, cfg, nullptr);
            cand.pose = pose;
            cand.inlier_count = s.inliers;
            cand.mean_error = s.mean_error;
        } catch (const DegenerateInputError&) {
            cand.inlier_count = -1;
        }
    });

    if (observer) {
        for (int it = 0; it < cfg.iterations; ++it) {
            const Candidate& cand = candidates[static_cast<std::size_t>(it)];
            RansacIterationLog log;
            log.iteration = it;
            log.sample_groups = cand.sample_groups;
            log.degenerate = cand.inlier_count < 0;
            log.inlier_count = std::max(cand.inlier_count, 0);
            log.mean_inlier_error = std::isfinite(cand.mean_error) ? cand.mean_error : 0.0;
            observer(log);
        }
    }

    // Deterministic reduction: earliest iteration wins ties.
    int best_index = -1;
    Score best;
    int usable = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
        const Candidate& cand = candidates[static_cast<std::size_t>(it)];
        if (cand.inlier_count < 0) continue;
        ++usable;
        const Score s{cand.inlier_count, cand.mean_error};
        if (best_index < 0 || better(s, best, cfg.scoring)) {
            best = s;
            best_index = it;
        }
    }
    if (best_index < 0) {
        throw NoPoseError("ransac_pnp: every iteration was degenerate");
    }

    Pose pose = candidates[static_cast<std::size_t>(best_index)].pose;
    Score final_score = best;

    if (cfg.refine && best.inliers >= 4) {
        std::vector<int> inlier_records;
        score_pose(pose, set, k, cfg, &inlier_records);
        std::vector<PixelPointPair> inliers;
        inliers.reserve(inlier_records.size());
        for (int idx : inlier_records) {
            const auto& rec = set.records[static_cast<std::size_t>(idx)];
            inliers.push_back({rec.pixel, rec.point});
        }
        try {
            const Pose refit = epnp_solve(inliers, k);
            const Score s = score_pose(refit, set, k, cfg, nullptr);
            if (s.inliers >= best.inliers) {
                pose = refit;
                final_score = s;
            }
        } catch (const DegenerateInputError&) {
            // Keep the un-refined winner.
        }
    }

    PoseEstimate estimate;
    estimate.pose = pose;
    estimate.inlier_count = final_score.inliers;
    estimate.mean_inlier_error =
        final_score.inliers > 0 && std::isfinite(final_score.mean_error) ? final_score.mean_error
                                                                         : 0.0;
    estimate.iterations_used = usable;
    return estimate;
}

}  // namespace hcce
