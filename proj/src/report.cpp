#include "imbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "imbench/csv.hpp"
#include "imbench/errors.hpp"
#include "imbench/format.hpp"

namespace imbench {

std::vector<std::optional<double>> compute_ranks(std::span<const std::optional<double>> scores,
                                                 const RankOptions& options) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].has_value()) present.push_back(i);
    }
    if (present.size() < 2) {
        throw std::invalid_argument("compute_ranks: need at least 2 present scores");
    }
    std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
        const double va = *scores[a], vb = *scores[b];
        if (va != vb) return options.higher_is_better ? va > vb : va < vb;
        return a < b;
    });

    std::vector<std::optional<double>> ranks(scores.size());
    std::size_t i = 0;
    while (i < present.size()) {
        std::size_t j = i;
        while (j < present.size() && *scores[present[j]] == *scores[present[i]]) ++j;
        // positions i..j-1 are tied over rank slots i+1..j
        double rank;
        switch (options.ties) {
        case RankOptions::TiePolicy::average:
            rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
            break;
        case RankOptions::TiePolicy::min:
            rank = static_cast<double>(i + 1);
            break;
        case RankOptions::TiePolicy::max:
            rank = static_cast<double>(j);
            break;
        default:
            rank = 0;
        }
        for (std::size_t l = i; l < j; ++l) ranks[present[l]] = rank;
        i = j;
    }
    return ranks;
}

RankTable rank_scores(const ScoreTable& scores, const RankOptions& options) {
    RankTable table;
    table.datasets = scores.datasets;
    table.methods = scores.methods;
    table.ranks.reserve(scores.values.size());
    for (const auto& row : scores.values) {
        table.ranks.push_back(compute_ranks(row, options));
    }
    return table;
}

namespace {

double percentile_linear(const std::vector<double>& sorted, double p) {
    if (sorted.size() == 1) return sorted.front();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<RankSummary> aggregate_ranks(const RankTable& table) {
    std::vector<RankSummary> out;
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        std::vector<double> ranks;
        for (const auto& row : table.ranks) {
            if (m < row.size() && row[m].has_value()) ranks.push_back(*row[m]);
        }
        if (ranks.empty()) {
            std::cerr << "aggregate_ranks: method '" << table.methods[m]
                      << "' has no ranked dataset, omitted\n";
            continue;
        }
        std::sort(ranks.begin(), ranks.end());
        RankSummary s;
        s.method = table.methods[m];
        s.n = ranks.size();
        s.min = ranks.front();
        s.max = ranks.back();
        s.mean = std::accumulate(ranks.begin(), ranks.end(), 0.0) /
                 static_cast<double>(ranks.size());
        s.p25 = percentile_linear(ranks, 25);
        s.p50 = percentile_linear(ranks, 50);
        s.p75 = percentile_linear(ranks, 75);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// Regularized incomplete gamma P(a, x) by series (x < a+1) or continued
// fraction, after Numerical Recipes.
double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0) return 0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a;
    double c = 1.0 / 1e-300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

} // namespace

double chi_square_upper_tail(double x, double dof) {
    if (x <= 0) return 1.0;
    return 1.0 - gamma_p(dof / 2.0, x / 2.0);
}

FriedmanResult friedman_statistic(const RankTable& table,
                                  std::span<const std::string> methods) {
    if (methods.size() < 2) throw std::invalid_argument("friedman: need k >= 2 methods");
    std::vector<std::size_t> cols;
    for (const auto& name : methods) {
        const auto it = std::find(table.methods.begin(), table.methods.end(), name);
        if (it == table.methods.end()) {
            throw std::invalid_argument("friedman: method '" + name + "' not in table");
        }
        cols.push_back(static_cast<std::size_t>(it - table.methods.begin()));
    }

    // keep rows complete on the selected methods; rank within those methods only
    const std::size_t k = cols.size();
    std::vector<double> rank_sum(k, 0.0);
    std::size_t n_complete = 0, dropped = 0;
    for (const auto& row : table.ranks) {
        std::vector<std::optional<double>> sub(k);
        bool complete = true;
        for (std::size_t c = 0; c < k; ++c) {
            if (cols[c] < row.size() && row[cols[c]].has_value()) {
                sub[c] = row[cols[c]];
            } else {
                complete = false;
            }
        }
        if (!complete) {
            ++dropped;
            continue;
        }
        // the stored ranks are "lower is better" already; re-rank among the subset
        RankOptions opt;
        opt.higher_is_better = false;
        const auto sub_ranks = compute_ranks(sub, opt);
        for (std::size_t c = 0; c < k; ++c) rank_sum[c] += *sub_ranks[c];
        ++n_complete;
    }
    if (n_complete < 2) throw std::invalid_argument("friedman: need N >= 2 complete datasets");

    const double n = static_cast<double>(n_complete);
    const double kd = static_cast<double>(k);
    double sum_sq = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double mean_rank = rank_sum[c] / n;
        sum_sq += mean_rank * mean_rank;
    }
    FriedmanResult result;
    result.k = k;
    result.n_datasets = n_complete;
    result.dropped_rows = dropped;
    result.chi_square = 12.0 * n / (kd * (kd + 1.0)) * sum_sq - 3.0 * n * (kd + 1.0);
    if (result.chi_square < 0 && result.chi_square > -1e-9) result.chi_square = 0;
    result.p_value = chi_square_upper_tail(result.chi_square, kd - 1.0);
    return result;
}

ScoreTable best_scores(std::span<const EvaluationRecord> records, const std::string& metric) {
    ScoreTable table;
    std::map<std::string, std::size_t> dataset_pos;
    std::map<MethodId, std::size_t> method_pos;
    for (const auto& r : records) {
        if (!dataset_pos.count(r.dataset_id)) {
            dataset_pos[r.dataset_id] = table.datasets.size();
            table.datasets.push_back(r.dataset_id);
        }
        if (!method_pos.count(r.config.method)) {
            method_pos[r.config.method] = table.methods.size();
            table.methods.push_back(method_display_name(r.config.method));
        }
    }
    table.values.assign(table.datasets.size(),
                        std::vector<std::optional<double>>(table.methods.size()));
    for (const auto& r : records) {
        if (r.status != RunStatus::ok || !r.metrics) continue;
        const double v = r.metrics->by_name(metric);
        auto& cell = table.values[dataset_pos[r.dataset_id]][method_pos[r.config.method]];
        if (!cell || v > *cell) cell = v;
    }
    return table;
}

DetailTable load_detail_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.size() < 2) throw ParseError("detail table too short: " + path);
    const auto& header = rows.front();
    if (header.empty() || header[0] != "method") {
        throw ParseError("detail table must start with a 'method' column: " + path);
    }
    DetailTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw ParseError("ragged row in " + path + " at line " + std::to_string(r + 1));
        }
        auto& entry = table[row[0]];
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] == "NA" || row[c].empty()) {
                entry[header[c]] = std::nullopt;
            } else {
                try {
                    entry[header[c]] = std::stod(row[c]);
                } catch (const std::exception&) {
                    throw ParseError("bad number '" + row[c] + "' in " + path);
                }
            }
        }
    }
    return table;
}

ScoreTable score_table_from_details(std::span<const std::pair<std::string, DetailTable>> tables,
                                    const std::string& metric,
                                    std::span<const std::string> methods) {
    ScoreTable out;
    out.methods.assign(methods.begin(), methods.end());
    for (const auto& [dataset, detail] : tables) {
        out.datasets.push_back(dataset);
        std::vector<std::optional<double>> row;
        row.reserve(methods.size());
        for (const auto& method : methods) {
            const auto mit = detail.find(method);
            if (mit == detail.end()) {
                row.emplace_back();
                continue;
            }
            const auto vit = mit->second.find(metric);
            row.push_back(vit == mit->second.end() ? std::nullopt : vit->second);
        }
        out.values.push_back(std::move(row));
    }
    return out;
}

std::vector<RuntimeSummary> summarize_runtimes(std::span<const EvaluationRecord> records) {
    std::map<MethodId, std::vector<double>> times;
    for (const auto& r : records) {
        if (r.status == RunStatus::ok || r.status == RunStatus::timeout) {
            times[r.config.method].push_back(r.resample_seconds);
        }
    }
    std::vector<RuntimeSummary> out;
    for (MethodId id : kAllMethods) {
        const auto it = times.find(id);
        if (it == times.end()) continue;
        const auto& t = it->second;
        RuntimeSummary s;
        s.method = method_display_name(id);
        s.n = t.size();
        s.min_seconds = *std::min_element(t.begin(), t.end());
        s.max_seconds = *std::max_element(t.begin(), t.end());
        s.mean_seconds = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
        out.push_back(s);
    }
    return out;
}

std::string render_rank_svg(std::span<const RankSummary> summaries, const std::string& title) {
    constexpr int kRowHeight = 26;
    constexpr int kLeftPad = 190;
    constexpr int kPlotWidth = 560;
    constexpr int kTopPad = 48;
    const int height = kTopPad + kRowHeight * static_cast<int>(summaries.size()) + 30;
    const int width = kLeftPad + kPlotWidth + 40;

    double max_rank = 1.0;
    for (const auto& s : summaries) max_rank = std::max(max_rank, s.max);

    auto x_of = [&](double rank) {
        return kLeftPad + (rank - 1.0) / std::max(1.0, max_rank - 1.0) * kPlotWidth;
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif' font-size='12'>\n";
    svg << "<text x='" << kLeftPad << "' y='20' font-size='14'>" << title << "</text>\n";
    for (double tick = 1.0; tick <= max_rank + 0.5; tick += std::max(1.0, std::floor(max_rank / 8.0))) {
        const double x = x_of(tick);
        svg << "<line x1='" << x << "' y1='" << kTopPad - 8 << "' x2='" << x << "' y2='"
            << height - 24 << "' stroke='#dddddd'/>\n";
        svg << "<text x='" << x - 4 << "' y='" << kTopPad - 12 << "' fill='#666666'>"
            << static_cast<int>(tick) << "</text>\n";
    }
    int row = 0;
    for (const auto& s : summaries) {
        const int y = kTopPad + row * kRowHeight + kRowHeight / 2;
        svg << "<text x='8' y='" << y + 4 << "'>" << s.method << " // " << s.n << "</text>\n";
        svg << "<line x1='" << x_of(s.min) << "' y1='" << y << "' x2='" << x_of(s.max) << "' y2='"
            << y << "' stroke='#bbbbbb'/>\n";
        // dark marks: min, mean, max
        for (double v : {s.min, s.mean, s.max}) {
            svg << "<rect x='" << x_of(v) - 1.5 << "' y='" << y - 7
                << "' width='3' height='14' fill='#333333'/>\n";
        }
        // blue marks: 25th, 50th, 75th percentiles
        for (double v : {s.p25, s.p50, s.p75}) {
            svg << "<circle cx='" << x_of(v) << "' cy='" << y << "' r='3.4' fill='#1f77b4'/>\n";
        }
        ++row;
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(std::span<const EvaluationRecord> records, const std::string& output_dir,
                 const ReportOptions& options) {
    if (records.empty()) throw std::invalid_argument("emit_report: no records");
    std::filesystem::create_directories(output_dir);
    const std::filesystem::path dir(output_dir);

    nlohmann::json summary_json;
    for (const auto& metric : options.metrics) {
        const auto scores = best_scores(records, metric);
        const auto table = rank_scores(scores);

        std::ofstream csv(dir / ("ranks_" + metric + ".csv"));
        if (!csv) throw std::runtime_error("cannot write rank CSV in " + output_dir);
        csv << "dataset";
        for (const auto& m : table.methods) csv << ',' << csv_escape(m);
        csv << '\n';
        for (std::size_t r = 0; r < table.datasets.size(); ++r) {
            csv << csv_escape(table.datasets[r]);
            for (const auto& cell : table.ranks[r]) {
                csv << ',';
                if (cell) csv << format_double(*cell);
            }
            csv << '\n';
        }

        const auto summaries = aggregate_ranks(table);
        nlohmann::json metric_json = nlohmann::json::array();
        for (const auto& s : summaries) {
            metric_json.push_back({{"method", s.method},
                                   {"mean", s.mean},
                                   {"min", s.min},
                                   {"max", s.max},
                                   {"p25", s.p25},
                                   {"p50", s.p50},
                                   {"p75", s.p75},
                                   {"n", s.n}});
        }
        summary_json[metric] = std::move(metric_json);

        if (options.write_svg) {
            std::ofstream svg(dir / ("ranks_" + metric + ".svg"));
            svg << render_rank_svg(summaries, "Rank distribution: " + metric);
        }
    }

    std::ofstream summary(dir / "summary.json");
    if (!summary) throw std::runtime_error("cannot write summary.json in " + output_dir);
    summary << summary_json.dump(2) << '\n';

    std::ofstream runtimes(dir / "runtimes.csv");
    runtimes << "method,min_seconds,mean_seconds,max_seconds,n\n";
    for (const auto& s : summarize_runtimes(records)) {
        runtimes << csv_escape(s.method) << ',' << format_double(s.min_seconds) << ','
                 << format_double(s.mean_seconds) << ',' << format_double(s.max_seconds) << ','
                 << s.n << '\n';
    }
}

} // namespace imbench
