#include "sriqa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

namespace sriqa {

namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error(ErrorKind::invalid_input, "correlation inputs differ in length");
    if (x.size() < 3)
        throw Error(ErrorKind::invalid_input, "correlation needs at least 3 samples");
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        throw Error(ErrorKind::zero_variance, "correlation input has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

// Counts inversions in y (sorted-by-x order) via bottom-up merge sort.
std::uint64_t count_swaps(std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> buf(n);
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width, hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (y[j] < y[i]) {
                    swaps += mid - i; // y[j] jumps all remaining left entries
                    buf[k++] = y[j++];
                } else {
                    buf[k++] = y[i++];
                }
            }
            while (i < mid) buf[k++] = y[i++];
            while (j < hi) buf[k++] = y[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      y.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return swaps;
}

// Sum of k*(k-1)/2 over runs of equal values in a sorted range.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
    std::uint64_t total = 0;
    while (first != last) {
        It run = first;
        while (run != last && eq(*first, *run)) ++run;
        const std::uint64_t k = static_cast<std::uint64_t>(run - first);
        total += k * (k - 1) / 2;
        first = run;
    }
    return total;
}

double quantile_linear(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::vector<double> average_ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && x[idx[j]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
        i = j;
    }
    return ranks;
}

double srcc(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    return pearson(average_ranks(x), average_ranks(y));
}

double plcc(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    return pearson(x, y);
}

double krcc(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    const std::size_t n = x.size();

    // Knight's method: sort by (x, y), count ties, then count y-inversions.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<std::pair<double, double>> xy(n);
    for (std::size_t i = 0; i < n; ++i) xy[i] = {x[idx[i]], y[idx[i]]};

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t n1 =
        tied_pairs(xy.begin(), xy.end(), [](auto& a, auto& b) { return a.first == b.first; });
    const std::uint64_t n3 = tied_pairs(xy.begin(), xy.end(), [](auto& a, auto& b) {
        return a.first == b.first && a.second == b.second;
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
    const std::uint64_t swaps = count_swaps(ys); // ys is now sorted
    const std::uint64_t n2 =
        tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

    if (n1 == n0 || n2 == n0)
        throw Error(ErrorKind::zero_variance, "krcc input is constant");
    const double con_minus_dis = static_cast<double>(n0) - static_cast<double>(n1) -
                                 static_cast<double>(n2) + static_cast<double>(n3) -
                                 2.0 * static_cast<double>(swaps);
    return con_minus_dis / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

AGResult alexander_govern(const GroupedScores& groups) {
    const int k = static_cast<int>(groups.size());
    if (k < 2)
        throw Error(ErrorKind::insufficient_data, "omnibus test needs at least 2 groups");

    struct G {
        double mean, se2;
        int n;
    };
    std::vector<G> gs;
    gs.reserve(groups.size());
    for (const auto& [scale, xs] : groups) {
        const int n = static_cast<int>(xs.size());
        if (n < 2)
            throw Error(ErrorKind::insufficient_data,
                        "group x" + scale.str() + " has fewer than 2 observations");
        double m = 0;
        for (double v : xs) m += v;
        m /= n;
        double s2 = 0;
        for (double v : xs) s2 += (v - m) * (v - m);
        s2 /= (n - 1);
        if (s2 == 0)
            throw Error(ErrorKind::degenerate_group,
                        "group x" + scale.str() + " has zero variance");
        gs.push_back({m, s2 / n, n});
    }

    double inv_sum = 0;
    for (const G& g : gs) inv_sum += 1.0 / g.se2;
    double grand = 0;
    for (const G& g : gs) grand += (1.0 / g.se2) / inv_sum * g.mean;

    double a_stat = 0;
    for (const G& g : gs) {
        const double t = (g.mean - grand) / std::sqrt(g.se2);
        const double nu = g.n - 1;
        const double a = nu - 0.5;
        const double b = 48.0 * a * a;
        double c = std::sqrt(a * std::log1p(t * t / nu));
        if (t < 0) c = -c;
        const double c2 = c * c;
        const double z = c + (c * c2 + 3.0 * c) / b -
                         (((4.0 * c2 * c2 + 33.0 * c2) * c2 + 240.0 * c2 + 855.0) * c) /
                             (10.0 * b * b + 8.0 * b * c2 * c2 + 1000.0 * b);
        a_stat += z * z;
    }

    AGResult r;
    r.statistic = a_stat;
    r.df = k - 1;
    r.p_value = boost::math::gamma_q(0.5 * r.df, 0.5 * a_stat);
    return r;
}

GroupedScores group_scores(const DatasetManifest& manifest, const std::string& method_id,
                           bool normalized) {
    GroupedScores out;
    for (const SampleRecord& rec : manifest.records) {
        if (!method_id.empty() && rec.method_id != method_id) continue;
        out[rec.scale].push_back(normalized ? manifest.normalized_label(rec) : rec.label);
    }
    return out;
}

ViolinData violin_data(const DatasetManifest& manifest) {
    if (manifest.records.empty())
        throw Error(ErrorKind::invalid_input, "violin data needs a nonempty manifest");
    ViolinData v;
    v.groups = group_scores(manifest);
    for (const auto& [scale, xs] : v.groups) {
        std::vector<double> s = xs;
        std::sort(s.begin(), s.end());
        GroupSummary g;
        g.scale = scale;
        g.n = static_cast<int>(s.size());
        g.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        g.median = quantile_linear(s, 0.5);
        g.q1 = quantile_linear(s, 0.25);
        g.q3 = quantile_linear(s, 0.75);
        g.min = s.front();
        g.max = s.back();
        v.summaries.push_back(g);
    }
    return v;
}

std::vector<nn::Mat<double>> weight_similarity(const Checkpoint& checkpoint,
                                               const std::vector<Rational>& scales) {
    if (checkpoint.config.framework != Framework::sgh)
        throw Error(ErrorKind::wrong_framework,
                    "weight similarity is defined for sgh checkpoints only");
    if (scales.empty())
        throw Error(ErrorKind::invalid_input, "weight similarity needs at least one scale");

    Model<double> model = restore<double>(checkpoint);
    std::vector<HeadParams<double>> heads;
    heads.reserve(scales.size());
    for (const Rational& s : scales)
        heads.push_back(model.generator.generate(embed_scale(s, model.embedder)));

    const int m = static_cast<int>(scales.size());
    std::vector<nn::Mat<double>> sims;
    for (int j = 0; j < HeadLayout::kLayers; ++j) {
        nn::Mat<double> sim(m, m);
        std::vector<double> norms(m);
        for (int i = 0; i < m; ++i) {
            norms[i] = std::sqrt(heads[i].w[j].cwiseProduct(heads[i].w[j]).sum());
            if (norms[i] == 0)
                throw Error(ErrorKind::zero_variance,
                            "generated weights for scale x" + scales[i].str() +
                                " have zero norm");
        }
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                sim(r, c) =
                    heads[r].w[j].cwiseProduct(heads[c].w[j]).sum() / (norms[r] * norms[c]);
        sims.push_back(std::move(sim));
    }
    return sims;
}

} // namespace sriqa
