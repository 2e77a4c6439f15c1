#pragma once

// Answer scoring: embed predicted answer and ground truth with the
// evaluation embedder, compare by cosine similarity, aggregate per method
// into five-number summaries (Tukey median-of-halves quartiles), and emit
// reports including a box-plot SVG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdeltkg/clients.hpp"
#include "gdeltkg/qa.hpp"
#include "gdeltkg/toml.hpp"

namespace gdeltkg {

struct GroundTruth {
    std::string question_id;
    std::string answer;
};

/// Reference answers for the default benchmark questions.
inline std::vector<GroundTruth> default_ground_truth() {
    return {
        {"q1", "The Francis Scott Key Bridge on the Patapsco River."},
        {"q2", "The ship was named the Dali."},
        {"q3", "CNN published 5 articles."},
        {"q4", "The collapse occurred on March 26, 2024."},
        {"q5", "Brandon Scott is the Mayor of Baltimore."},
        {"q6", "Niki Fennoy is a city police spokesman."},
        {"q7", "Themes include maritime incidents, manmade disaster, and water-related topics."},
    };
}

inline std::vector<GroundTruth> load_ground_truth(const std::string& path) {
    auto doc = toml::parse_file(path);
    auto it = doc.arrays.find("truth");
    if (it == doc.arrays.end()) throw std::runtime_error(path + " has no [[truth]] entries");
    std::vector<GroundTruth> out;
    std::set<std::string> ids;
    for (const auto& t : it->second) {
        GroundTruth g{t.get_str("id"), t.get_str("answer")};
        if (g.question_id.empty()) throw std::runtime_error(path + ": truth entry without id");
        if (!ids.insert(g.question_id).second)
            throw std::runtime_error(path + ": duplicate ground truth for " + g.question_id);
        out.push_back(std::move(g));
    }
    return out;
}

inline double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine similarity dimension mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) throw std::invalid_argument("undefined similarity for a zero vector");
    double sim = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(sim, -1.0, 1.0);
}

struct EvalScore {
    std::string question_id;
    std::string method;
    double cosine = 0;
    std::string embedder_id;
    bool refusal = false;  // answer matched a refusal pattern; scored anyway
};

struct ScoreMiss {
    std::string question_id;
    std::string method;
    std::string reason;
};

struct ScoreOutcome {
    std::vector<EvalScore> scores;
    std::vector<ScoreMiss> missing;
};

inline std::vector<std::string> default_refusal_patterns() {
    return {"i don't know", "i do not know", "cannot answer", "can't answer",
            "not mentioned", "no mention", "not provided", "not present in the given data",
            "don't have enough information", "do not have enough information"};
}

/// One score per ok-status result with a matching ground truth; error
/// results and missing truths become explicit misses, never zeros.
inline ScoreOutcome score_run(const std::vector<QAResult>& results, const std::vector<GroundTruth>& truths,
                              EmbedClient& embedder,
                              const std::vector<std::string>& refusal_patterns = default_refusal_patterns()) {
    std::map<std::string, std::string> truth_by_id;
    for (const auto& t : truths) truth_by_id[t.question_id] = t.answer;

    ScoreOutcome out;
    for (const auto& r : results) {
        if (r.status != "ok") {
            out.missing.push_back({r.question_id, r.method_label, "result status: " + r.status});
            continue;
        }
        auto it = truth_by_id.find(r.question_id);
        if (it == truth_by_id.end()) {
            out.missing.push_back({r.question_id, r.method_label, "no ground truth for question"});
            continue;
        }
        auto vecs = embedder.embed({r.answer, it->second});
        if (vecs.size() != 2) {
            out.missing.push_back({r.question_id, r.method_label, "embedder returned wrong vector count"});
            continue;
        }
        EvalScore s;
        s.question_id = r.question_id;
        s.method = r.method_label;
        s.cosine = cosine_similarity(vecs[0], vecs[1]);
        s.embedder_id = embedder.id();
        for (const auto& pat : refusal_patterns)
            if (icontains(r.answer, pat)) {
                s.refusal = true;
                break;
            }
        out.scores.push_back(std::move(s));
    }
    return out;
}

struct MethodSummary {
    std::string method;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    size_t n = 0;
};

namespace detail {

inline double median_of(const std::vector<double>& sorted, size_t begin, size_t end) {
    size_t n = end - begin;
    size_t mid = begin + n / 2;
    if (n % 2 == 1) return sorted[mid];
    return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

}  // namespace detail

/// Five-number summary with Tukey quartiles: halves exclude the overall
/// median element when n is odd.
inline MethodSummary five_number_summary(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("cannot summarize an empty score list");
    std::sort(values.begin(), values.end());
    MethodSummary s;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.median = detail::median_of(values, 0, values.size());
    size_t half = values.size() / 2;
    if (values.size() == 1) {
        s.q1 = s.q3 = values[0];
    } else {
        s.q1 = detail::median_of(values, 0, half);
        s.q3 = detail::median_of(values, values.size() % 2 == 1 ? half + 1 : half, values.size());
    }
    return s;
}

inline std::vector<MethodSummary> summarize(const std::vector<EvalScore>& scores) {
    std::map<std::string, std::vector<double>> by_method;
    for (const auto& s : scores) by_method[s.method].push_back(s.cosine);
    std::vector<MethodSummary> out;
    for (const auto& [method, values] : by_method) {
        MethodSummary s = five_number_summary(values);
        s.method = method;
        out.push_back(std::move(s));
    }
    return out;
}

inline constexpr const char* kAnswersFormat = "gdeltkg-answers";
inline constexpr int kAnswersFormatVersion = 1;

/// External pipelines' answers (for scoring alongside native runs).
/// Schema: {"format":"gdeltkg-answers","format_version":1,
///          "answers":[{"question_id","method","answer"}...]}.
/// A blank file means no answers.
inline std::vector<QAResult> import_external_answers(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (trim(text).empty()) return {};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("unparseable answers file " + path + ": " + e.what());
    }
    if (j.value("format", "") != kAnswersFormat)
        throw std::runtime_error(path + " is not an external answers file");
    int ver = j.value("format_version", 0);
    if (ver != kAnswersFormatVersion)
        throw std::runtime_error("answers file format_version " + std::to_string(ver) +
                                 " unsupported; this build reads version " + std::to_string(kAnswersFormatVersion));
    std::vector<QAResult> out;
    std::set<std::pair<std::string, std::string>> seen;
    size_t idx = 0;
    for (const auto& rec : j.value("answers", nlohmann::json::array())) {
        ++idx;
        std::string qid = rec.value("question_id", "");
        std::string method = rec.value("method", "");
        if (qid.empty() || method.empty() || !rec.contains("answer"))
            throw std::runtime_error(path + ": record " + std::to_string(idx) +
                                     " needs question_id, method, and answer");
        if (!seen.insert({qid, method}).second)
            throw std::runtime_error(path + ": duplicate (question, method) record: (" + qid + ", " + method + ")");
        QAResult r;
        r.question_id = qid;
        r.method = Method::Imported;
        r.method_label = "imported:" + method;
        r.answer = rec.at("answer").get<std::string>();
        r.model = rec.value("model", "");
        out.push_back(std::move(r));
    }
    return out;
}

enum class ReportFormat { TableText, Csv, Json, BoxplotSvg };

inline std::optional<ReportFormat> report_format_from_name(std::string_view name) {
    if (name == "table" || name == "table_text" || name == "txt") return ReportFormat::TableText;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    if (name == "boxplot_svg" || name == "svg") return ReportFormat::BoxplotSvg;
    return std::nullopt;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string report_table_text(const std::vector<MethodSummary>& summaries) {
    std::ostringstream os;
    os << "method                     n      min       q1   median       q3      max\n";
    for (const auto& s : summaries) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-24s %4zu %8.4f %8.4f %8.4f %8.4f %8.4f\n", s.method.c_str(), s.n,
                      s.min, s.q1, s.median, s.q3, s.max);
        os << line;
    }
    os << "\nquartiles: Tukey median-of-halves (overall median excluded from halves for odd n)\n";
    return os.str();
}

inline std::string report_csv(const std::vector<EvalScore>& scores) {
    std::vector<const EvalScore*> rows;
    for (const auto& s : scores) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](const EvalScore* a, const EvalScore* b) {
        if (a->question_id != b->question_id) return a->question_id < b->question_id;
        return a->method < b->method;
    });
    std::string out = "question_id,method,cosine_similarity,embedder,refusal\n";
    for (const auto* s : rows) {
        out += s->question_id + "," + s->method + "," + fmt(s->cosine) + "," + s->embedder_id + "," +
               (s->refusal ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string report_json(const std::vector<MethodSummary>& summaries, const std::vector<EvalScore>& scores,
                               const std::vector<ScoreMiss>& missing) {
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : summaries)
        sj.push_back({{"method", s.method}, {"n", s.n}, {"min", s.min}, {"q1", s.q1},
                      {"median", s.median}, {"q3", s.q3}, {"max", s.max}});
    nlohmann::json scj = nlohmann::json::array();
    for (const auto& s : scores)
        scj.push_back({{"question_id", s.question_id}, {"method", s.method}, {"cosine_similarity", s.cosine},
                       {"embedder", s.embedder_id}, {"refusal", s.refusal}});
    nlohmann::json mj = nlohmann::json::array();
    for (const auto& m : missing)
        mj.push_back({{"question_id", m.question_id}, {"method", m.method}, {"reason", m.reason}});
    return nlohmann::json{{"summaries", sj}, {"scores", scj}, {"missing", mj},
                          {"quartile_convention", "tukey-median-of-halves"}}
        .dump(2);
}

/// One box per method from its five-number summary; fixed layout, fixed
/// precision, so identical inputs give identical bytes.
inline std::string report_boxplot_svg(const std::vector<MethodSummary>& summaries) {
    const double box_w = 60, gap = 50, left = 70, top = 20, plot_h = 300, bottom_pad = 70;
    double width = left + summaries.size() * (box_w + gap) + gap;
    double height = top + plot_h + bottom_pad;

    double lo = 0.0;
    for (const auto& s : summaries) lo = std::min(lo, s.min);
    lo = std::floor(lo * 4.0) / 4.0;  // down to a multiple of 0.25
    const double hi = 1.0;
    auto y = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << static_cast<int>(width) << "\" height=\""
       << static_cast<int>(height) << "\">\n";
    os << "  <text x=\"" << static_cast<int>(width / 2)
       << "\" y=\"14\" text-anchor=\"middle\" font-size=\"13\">cosine similarity vs ground truth</text>\n";
    // y axis with ticks every 0.25
    os << "  <line x1=\"" << left - 10 << "\" y1=\"" << fmt(y(hi)) << "\" x2=\"" << left - 10 << "\" y2=\""
       << fmt(y(lo)) << "\" stroke=\"black\"/>\n";
    for (double v = lo; v <= hi + 1e-9; v += 0.25) {
        os << "  <line x1=\"" << left - 14 << "\" y1=\"" << fmt(y(v)) << "\" x2=\"" << left - 10 << "\" y2=\""
           << fmt(y(v)) << "\" stroke=\"black\"/>\n";
        char label[16];
        std::snprintf(label, sizeof(label), "%.2f", v);
        os << "  <text x=\"" << left - 18 << "\" y=\"" << fmt(y(v) + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
    }
    size_t i = 0;
    for (const auto& s : summaries) {
        double cx = left + gap + i * (box_w + gap) + box_w / 2;
        double x0 = cx - box_w / 2, x1 = cx + box_w / 2;
        // whiskers
        os << "  <line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y(s.max)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
           << fmt(y(s.q3)) << "\" stroke=\"black\"/>\n";
        os << "  <line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y(s.q1)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
           << fmt(y(s.min)) << "\" stroke=\"black\"/>\n";
        os << "  <line x1=\"" << fmt(x0 + 10) << "\" y1=\"" << fmt(y(s.max)) << "\" x2=\"" << fmt(x1 - 10)
           << "\" y2=\"" << fmt(y(s.max)) << "\" stroke=\"black\"/>\n";
        os << "  <line x1=\"" << fmt(x0 + 10) << "\" y1=\"" << fmt(y(s.min)) << "\" x2=\"" << fmt(x1 - 10)
           << "\" y2=\"" << fmt(y(s.min)) << "\" stroke=\"black\"/>\n";
        // box and median
        os << "  <rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y(s.q3)) << "\" width=\"" << fmt(box_w)
           << "\" height=\"" << fmt(std::max(0.5, y(s.q1) - y(s.q3)))
           << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        os << "  <line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y(s.median)) << "\" x2=\"" << fmt(x1)
           << "\" y2=\"" << fmt(y(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        os << "  <text x=\"" << fmt(cx) << "\" y=\"" << fmt(top + plot_h + 20)
           << "\" text-anchor=\"middle\" font-size=\"11\">" << s.method << "</text>\n";
        os << "  <text x=\"" << fmt(cx) << "\" y=\"" << fmt(top + plot_h + 36)
           << "\" text-anchor=\"middle\" font-size=\"10\">n=" << s.n << "</text>\n";
        ++i;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace detail

/// Writes one file per requested format into `out_dir`:
/// report.txt / scores.csv / report.json / boxplot.svg.
inline void emit_report(const std::vector<MethodSummary>& summaries, const std::vector<EvalScore>& scores,
                        const std::vector<ScoreMiss>& missing, const std::string& out_dir,
                        const std::vector<ReportFormat>& formats) {
    if (summaries.empty()) throw std::runtime_error("nothing to report: no summaries");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
        out << content;
    };
    for (ReportFormat f : formats) {
        switch (f) {
            case ReportFormat::TableText: write("report.txt", detail::report_table_text(summaries)); break;
            case ReportFormat::Csv: write("scores.csv", detail::report_csv(scores)); break;
            case ReportFormat::Json: write("report.json", detail::report_json(summaries, scores, missing) + "\n"); break;
            case ReportFormat::BoxplotSvg: write("boxplot.svg", detail::report_boxplot_svg(summaries)); break;
        }
    }
}

}  // namespace gdeltkg
