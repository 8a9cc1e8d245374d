// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/html.hpp"

#include <algorithm>
#include <cctype>

#include "genomagent/core/text.hpp"

namespace genomagent {

namespace {

bool is_void_element(const std::string& tag) {
  static const char* kVoid[] = {"area", "base", "br",    "col",  "embed",
                                "hr",   "img",  "input", "link", "meta",
                                "source", "track", "wbr"};
  return std::any_of(std::begin(kVoid), std::end(kVoid),
                     [&](const char* v) { return tag == v; });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      auto try_entity = [&](std::string_view name, char replacement) {
        if (s.substr(i, name.size()) == name) {
          out.push_back(replacement);
          i += name.size();
          return true;
        }
        return false;
      };
      if (try_entity("&amp;", '&') || try_entity("&lt;", '<') || try_entity("&gt;", '>') ||
          try_entity("&quot;", '"') || try_entity("&#39;", '\'') || try_entity("&apos;", '\'')) {
        continue;
      }
      if (s.substr(i, 6) == "&nbsp;") {
        out.push_back(' ');
        i += 6;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

struct Parser {
  std::string_view html;
  std::size_t pos = 0;

  bool done() const { return pos >= html.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < html.size() ? html[pos + ahead] : '\0';
  }
  bool starts_with(std::string_view prefix) const {
    return html.substr(pos, prefix.size()) == prefix;
  }
  void skip_to(std::string_view marker) {
    auto at = html.find(marker, pos);
    pos = at == std::string_view::npos ? html.size() : at + marker.size();
  }

  std::string read_name() {
    std::string name;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-' ||
                       peek() == '_' || peek() == ':')) {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(peek()))));
      ++pos;
    }
    return name;
  }

  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
  }

  std::map<std::string, std::string> read_attrs() {
    std::map<std::string, std::string> attrs;
    while (true) {
      skip_ws();
      if (done() || peek() == '>' || starts_with("/>")) break;
      std::string name = read_name();
      if (name.empty()) {
        ++pos;  // unparseable character inside a tag
        continue;
      }
      skip_ws();
      std::string value;
      if (peek() == '=') {
        ++pos;
        skip_ws();
        if (peek() == '"' || peek() == '\'') {
          char quote = peek();
          ++pos;
          while (!done() && peek() != quote) {
            value.push_back(peek());
            ++pos;
          }
          if (!done()) ++pos;
        } else {
          while (!done() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '>' &&
                 !starts_with("/>")) {
            value.push_back(peek());
            ++pos;
          }
        }
      }
      attrs[name] = decode_entities(value);
    }
    return attrs;
  }
};

}  // namespace

bool HtmlNode::has_class(std::string_view name) const {
  auto it = attrs.find("class");
  if (it == attrs.end()) return false;
  std::size_t pos = 0;
  const std::string& classes = it->second;
  while (pos < classes.size()) {
    while (pos < classes.size() && std::isspace(static_cast<unsigned char>(classes[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < classes.size() && !std::isspace(static_cast<unsigned char>(classes[pos]))) ++pos;
    if (std::string_view(classes).substr(start, pos - start) == name) return true;
  }
  return false;
}

std::unique_ptr<HtmlNode> parse_html(std::string_view html) {
  auto root = std::make_unique<HtmlNode>();
  root->tag = "#document";

  std::vector<HtmlNode*> stack{root.get()};
  Parser p{html};

  auto append_text = [&](std::string_view raw) {
    std::string text = decode_entities(raw);
    if (trim(text).empty()) return;
    auto node = std::make_unique<HtmlNode>();
    node->text = std::move(text);
    stack.back()->children.push_back(std::move(node));
  };

  while (!p.done()) {
    if (p.peek() != '<') {
      std::size_t start = p.pos;
      auto next = html.find('<', p.pos);
      p.pos = next == std::string_view::npos ? html.size() : next;
      append_text(html.substr(start, p.pos - start));
      continue;
    }

    if (p.starts_with("<!--")) {
      p.skip_to("-->");
      continue;
    }
    if (p.starts_with("<!") || p.starts_with("<?")) {
      p.skip_to(">");
      continue;
    }
    if (p.starts_with("</")) {
      p.pos += 2;
      std::string tag = p.read_name();
      p.skip_to(">");
      // Pop to the matching open element; ignore stray close tags.
      for (std::size_t i = stack.size(); i-- > 1;) {
        if (stack[i]->tag == tag) {
          stack.resize(i);
          break;
        }
      }
      continue;
    }

    // Open tag.
    ++p.pos;
    std::string tag = p.read_name();
    if (tag.empty()) {
      append_text("<");
      continue;
    }
    auto node = std::make_unique<HtmlNode>();
    node->tag = tag;
    node->attrs = p.read_attrs();
    bool self_closing = p.starts_with("/>");
    p.skip_to(">");

    HtmlNode* raw = node.get();
    stack.back()->children.push_back(std::move(node));

    if (tag == "script" || tag == "style") {
      // Raw text until the matching close tag; content is kept as one text node.
      std::string close = "</" + tag;
      auto at = html.find(close, p.pos);
      std::size_t end = at == std::string_view::npos ? html.size() : at;
      std::string content = std::string(html.substr(p.pos, end - p.pos));
      if (!trim(content).empty()) {
        auto text_node = std::make_unique<HtmlNode>();
        text_node->text = std::move(content);
        raw->children.push_back(std::move(text_node));
      }
      p.pos = end;
      if (at != std::string_view::npos) p.skip_to(">");
      continue;
    }

    if (!self_closing && !is_void_element(tag)) {
      stack.push_back(raw);
    }
  }
  return root;
}

// ---------------------------------------------------------------------------
// CSS subset

namespace {

struct Compound {
  std::string tag;                   // empty = any
  std::vector<std::string> classes;  // all must be present
  std::string id;                    // empty = any
};

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

bool parse_compound(std::string_view token, Compound* out) {
  std::size_t i = 0;
  while (i < token.size()) {
    if (token[i] == '.') {
      std::size_t start = ++i;
      while (i < token.size() && token[i] != '.' && token[i] != '#') ++i;
      if (!valid_name(token.substr(start, i - start))) return false;
      out->classes.emplace_back(token.substr(start, i - start));
    } else if (token[i] == '#') {
      std::size_t start = ++i;
      while (i < token.size() && token[i] != '.' && token[i] != '#') ++i;
      if (!valid_name(token.substr(start, i - start)) || !out->id.empty()) return false;
      out->id = std::string(token.substr(start, i - start));
    } else {
      if (i != 0) return false;  // tag must come first
      std::size_t start = i;
      while (i < token.size() && token[i] != '.' && token[i] != '#') ++i;
      if (!valid_name(token.substr(start, i - start))) return false;
      out->tag = lower(token.substr(start, i - start));
    }
  }
  return !out->tag.empty() || !out->classes.empty() || !out->id.empty();
}

bool parse_selector(std::string_view selector, std::vector<Compound>* out) {
  std::size_t pos = 0;
  while (pos < selector.size()) {
    while (pos < selector.size() && std::isspace(static_cast<unsigned char>(selector[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < selector.size() && !std::isspace(static_cast<unsigned char>(selector[pos]))) ++pos;
    if (pos == start) break;
    Compound compound;
    if (!parse_compound(selector.substr(start, pos - start), &compound)) return false;
    out->push_back(std::move(compound));
  }
  return !out->empty();
}

bool matches(const HtmlNode& node, const Compound& compound) {
  if (node.is_text()) return false;
  if (!compound.tag.empty() && node.tag != compound.tag) return false;
  if (!compound.id.empty()) {
    auto it = node.attrs.find("id");
    if (it == node.attrs.end() || it->second != compound.id) return false;
  }
  for (const auto& cls : compound.classes) {
    if (!node.has_class(cls)) return false;
  }
  return true;
}

// Leading compounds must match ancestors in order (any gaps); greedy
// earliest-ancestor matching is sufficient for subsequence checks.
bool ancestors_satisfy(const std::vector<const HtmlNode*>& ancestors,
                       const std::vector<Compound>& compounds) {
  std::size_t want = 0;
  std::size_t last = compounds.size() - 1;  // all but the final compound
  for (const HtmlNode* ancestor : ancestors) {
    if (want == last) return true;
    if (matches(*ancestor, compounds[want])) ++want;
  }
  return want == last;
}

void walk(const HtmlNode& node, const std::vector<Compound>& compounds,
          std::vector<const HtmlNode*>& ancestors, std::vector<const HtmlNode*>* out) {
  if (!node.is_text()) {
    if (matches(node, compounds.back()) && ancestors_satisfy(ancestors, compounds)) {
      out->push_back(&node);
    }
    ancestors.push_back(&node);
    for (const auto& child : node.children) walk(*child, compounds, ancestors, out);
    ancestors.pop_back();
  }
}

}  // namespace

bool css_selector_valid(std::string_view selector) {
  std::vector<Compound> compounds;
  return parse_selector(selector, &compounds);
}

std::vector<const HtmlNode*> select_css(const HtmlNode& root, std::string_view selector) {
  std::vector<Compound> compounds;
  if (!parse_selector(selector, &compounds)) return {};
  std::vector<const HtmlNode*> out;
  std::vector<const HtmlNode*> ancestors;
  for (const auto& child : root.children) walk(*child, compounds, ancestors, &out);
  return out;
}

std::string text_content(const HtmlNode& node) {
  std::string raw;
  if (node.is_text()) {
    raw = node.text;
  } else {
    for (const auto& child : node.children) {
      std::string part = text_content(*child);
      if (part.empty()) continue;
      if (!raw.empty()) raw.push_back(' ');
      raw += part;
    }
  }
  return trim(collapse_whitespace(raw));
}

namespace {

void collect_paths(const HtmlNode& node, const std::string& prefix,
                   std::vector<std::string>* out) {
  for (const auto& child : node.children) {
    if (child->is_text()) continue;
    std::string label = child->tag;
    auto it = child->attrs.find("class");
    if (it != child->attrs.end()) {
      std::vector<std::string> classes = split_symbols(it->second);
      std::sort(classes.begin(), classes.end());
      for (const auto& cls : classes) label += "." + cls;
    }
    std::string path = prefix.empty() ? label : prefix + ">" + label;
    out->push_back(path);
    collect_paths(*child, path, out);
  }
}

}  // namespace

std::vector<std::string> element_paths(const HtmlNode& root) {
  std::vector<std::string> out;
  collect_paths(root, "", &out);
  return out;
}

}  // namespace genomagent
