#include "qclip/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace qclip::svg {

namespace {

constexpr double kWidth = 680.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;  // room for the legend
constexpr double kTop = 44.0;
constexpr double kBottom = 56.0;

const char* kPalette[] = {"#1f6fb4", "#d0541e", "#2a8c3c", "#8442a8",
                          "#b01a32", "#6b6b20", "#0f8b8b", "#555555"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_line_plot(std::ostream& os, const std::vector<Series>& series
                     , const std::string& title, const std::string& x_label,
                     const std::string& y_label) {
    if (series.empty()) {
        throw EmptyInput("plot needs at least one series");
    }
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    bool any = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw DimensionMismatch("series x/y lengths differ");
        }
        for (index_t i = 0; i < s.x.size(); ++i) {
            any = true;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!any) {
        throw EmptyInput("plot needs at least one point");
    }
    if (x_max - x_min < 1e-12) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " " << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(title) << "</text>\n";

    // frame and ticks
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
       << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_min + (x_max - x_min) * t / 4.0;
        const double fy = y_min + (y_max - y_min) * t / 4.0;
        os << "<line x1=\"" << sx(fx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << sx(fx)
           << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << sx(fx) << "\" y=\"" << kTop + plot_h + 18
           << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << kLeft
           << "\" y2=\"" << sy(fy) << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 4
           << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
       << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + plot_h / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">"
       << escape(y_label) << "</text>\n";

    for (index_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.x.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
            for (index_t i = 0; i < s.x.size(); ++i) {
                os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << " ";
            }
            os << "\"/>\n";
        }
        if (s.x.size() <= 60) {
            for (index_t i = 0; i < s.x.size(); ++i) {
                os << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i]))
                   << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
            }
        }
        // legend row
        const double ly = kTop + 10 + 18.0 * static_cast<double>(si);
        os << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly << "\" x2=\""
           << kWidth - kRight + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly + 4 << "\">"
           << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
}

PlotKind plot_kind_from_string(const std::string& s) {
    if (s == "lip_vs_epoch") return PlotKind::lip_vs_epoch;
    if (s == "lambda_sweep") return PlotKind::lambda_sweep;
    if (s == "acc_lip_vs_epoch") return PlotKind::acc_lip_vs_epoch;
    throw InvalidConfig("unknown plot kind: " + s);
}

void emit_plot(const train::MetricsLog& log, PlotKind kind, std::ostream& os) {
    if (log.rows.empty()) {
        throw EmptyInput("metrics log is empty");
    }
    std::vector<Series> series;
    switch (kind) {
        case PlotKind::lip_vs_epoch: {
            std::map<std::string, Series> by_norm;
            for (const auto& r : log.rows) {
                auto& s = by_norm[r.norm];
                s.label = r.norm;
                s.x.push_back(static_cast<double>(r.epoch));
                s.y.push_back(r.lip_hybrid);
            }
            for (auto& [k, s] : by_norm) {
                series.push_back(std::move(s));
            }
            write_line_plot(os, series, "Certified Lipschitz bound during training", "epoch",
                            "certified bound");
            return;
        }
        case PlotKind::lambda_sweep: {
            // final-epoch bound per lambda, one series per norm
            std::map<std::string, std::map<double, train::MetricsRow>> latest;
            for (const auto& r : log.rows) {
                auto& slot = latest[r.norm][r.lambda];
                if (r.epoch >= slot.epoch) {
                    slot = r;
                }
            }
            for (auto& [norm, rows] : latest) {
                Series s;
                s.label = norm;
                for (auto& [lambda, row] : rows) {
                    s.x.push_back(lambda);
                    s.y.push_back(row.lip_hybrid);
                }
                series.push_back(std::move(s));
            }
            write_line_plot(os, series, "Certified bound vs regularization weight", "lambda",
                            "final certified bound");
            return;
        }
        case PlotKind::acc_lip_vs_epoch: {
            std::map<std::string, Series> acc;
            std::map<std::string, Series> lip;
            for (const auto& r : log.rows) {
                auto& a = acc[r.method];
                a.label = r.method + " test_acc";
                a.x.push_back(static_cast<double>(r.epoch));
                a.y.push_back(r.test_acc);
                auto& l = lip[r.method];
                l.label = r.method + " lip";
                l.x.push_back(static_cast<double>(r.epoch));
                l.y.push_back(r.lip_hybrid);
            }
            for (auto& [k, s] : acc) {
                series.push_back(std::move(s));
            }
            for (auto& [k, s] : lip) {
                series.push_back(std::move(s));
            }
            write_line_plot(os, series, "Accuracy and certified bound by training method", "epoch",
                            "value");
            return;
        }
    }
}

}  // namespace qclip::svg
