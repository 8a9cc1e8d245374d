// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace genomagent {

/// Minimal HTML document node. Element nodes carry a tag and attributes;
/// text nodes carry only `text`. Good enough for the table/list shaped
/// pages the extraction pipeline consumes; not a browser-grade parser.
struct HtmlNode {
  std::string tag;  // empty for text nodes
  std::string text;
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<HtmlNode>> children;

  bool is_text() const { return tag.empty(); }
  bool has_class(std::string_view name) const;
};

/// Parses lenient real-world HTML into a synthetic "#document" root.
/// Unclosed tags, stray close tags and comments are tolerated.
std::unique_ptr<HtmlNode> parse_html(std::string_view html);

/// CSS selector subset: compound selectors of tag, ".class" and "#id"
/// (e.g. "td.chr", "table#genes"), combined by descendant whitespace
/// ("table.results td"). Returns matches in document order.
std::vector<const HtmlNode*> select_css(const HtmlNode& root, std::string_view selector);

/// True when the selector parses under the supported subset.
bool css_selector_valid(std::string_view selector);

/// Concatenated, whitespace-collapsed text of the subtree.
std::string text_content(const HtmlNode& node);

/// Tag/class skeleton paths of every element, used for structure
/// fingerprinting; text content never participates.
std::vector<std::string> element_paths(const HtmlNode& root);

}  // namespace genomagent
