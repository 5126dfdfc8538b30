#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qclip/train.hpp"

namespace qclip::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Standalone line plot: axes, ticks, legend, polyline + markers per series.
// The output references no external resources.
void write_line_plot(std::ostream& os, const std::vector<Series>& series,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label);

enum class PlotKind { lip_vs_epoch, lambda_sweep, acc_lip_vs_epoch };

PlotKind plot_kind_from_string(const std::string& s);

// Render a metrics log: one series per norm (lip_vs_epoch), final bound per
// lambda grouped by norm (lambda_sweep), or accuracy + bound per method
// (acc_lip_vs_epoch).
void emit_plot(const train::MetricsLog& log, PlotKind kind, std::ostream& os);

}  // namespace qclip::svg
