#pragma once

// Static SVG figures for the stats report.

#include <string>
#include <vector>

#include "monogeo/stats.hpp"

namespace monogeo {

// Standardized boxplots, one per attribute, sharing a vertical axis.
std::string render_boxplot_svg(const std::vector<AttributeStats>& attributes, const std::string& title);

std::string render_histogram_svg(const Histogram& hist, const std::string& title);

}  // namespace monogeo
