#include "alsp/cli/viz.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace alsp::viz {
namespace {

constexpr int kCell = 8;
constexpr int kHeight = 24;
constexpr int kMargin = 4;
constexpr int kLabelWidth = 48;

std::string group_color(std::size_t g) {
  // Golden-angle hue steps keep neighbouring groups distinguishable.
  const int hue = static_cast<int>((g * 137) % 360);
  return fmt::format("hsl({},65%,55%)", hue);
}

}  // namespace

std::vector<std::size_t> word_boundaries(const Alignment& align) {
  std::vector<std::size_t> out;
  for (const auto& u : align.units()) {
    out.push_back(u.start_token);
    out.push_back(u.end_token);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string render_svg(const GroupMap& groups, const Alignment& align) {
  const std::size_t len = groups.original_len();
  const int strip_width = static_cast<int>(len) * kCell;
  const int width = 2 * kMargin + strip_width + kLabelWidth;
  const int height = 2 * kMargin + kHeight;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      width, height);
  svg += fmt::format("<g id=\"groups\" data-count=\"{}\">\n", groups.group_count());
  for (std::size_t g = 0; g < groups.group_count(); ++g) {
    const Span s = groups.group(g);
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
        "data-start=\"{}\" data-end=\"{}\"/>\n",
        kMargin + static_cast<int>(s.begin) * kCell, kMargin, static_cast<int>(s.size()) * kCell,
        kHeight, group_color(g), s.begin, s.end);
  }
  svg += "</g>\n<g id=\"words\" stroke=\"black\" stroke-width=\"1\">\n";
  for (std::size_t b : word_boundaries(align)) {
    const int x = kMargin + static_cast<int>(b) * kCell;
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" data-token=\"{3}\"/>\n", x,
                       kMargin - 2, kMargin + kHeight + 2, b);
  }
  svg += "</g>\n";
  svg += fmt::format(
      "<text id=\"group-count\" x=\"{}\" y=\"{}\" font-family=\"monospace\" "
      "font-size=\"12\">{}</text>\n",
      kMargin + strip_width + 8, kMargin + kHeight / 2 + 4, groups.group_count());
  svg += "</svg>\n";
  return svg;
}

std::string render_text(const GroupMap& groups, const Alignment& align) {
  const auto bounds = word_boundaries(align);
  std::string strip;
  std::size_t next_bound = 0;
  auto emit_bounds = [&](std::size_t pos) {
    while (next_bound < bounds.size() && bounds[next_bound] == pos) {
      strip.push_back('|');
      ++next_bound;
    }
  };
  for (std::size_t g = 0; g < groups.group_count(); ++g) {
    const Span s = groups.group(g);
    const char letter = static_cast<char>('a' + g % 26);
    emit_bounds(s.begin);
    strip.push_back('[');
    for (std::size_t t = s.begin; t < s.end; ++t) {
      if (t > s.begin) emit_bounds(t);
      strip.push_back(letter);
    }
    strip.push_back(']');
  }
  emit_bounds(groups.original_len());
  return fmt::format("{}  {}\n", strip, groups.group_count());
}

}  // namespace alsp::viz
