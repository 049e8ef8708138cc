#pragma once

#include <string>

#include "alsp/sequence.hpp"

namespace alsp::viz {

/// One-row strip: each group a colored span, word boundaries as vertical
/// lines, the group count on the right.
std::string render_svg(const GroupMap& groups, const Alignment& align);

/// Text strip: groups as bracketed spans of one letter per token, '|' at
/// word boundaries, then two spaces and the group count.
std::string render_text(const GroupMap& groups, const Alignment& align);

/// Sorted, deduplicated token positions where a word starts or ends.
std::vector<std::size_t> word_boundaries(const Alignment& align);

}  // namespace alsp::viz
