// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "genomagent/agent/html.hpp"
#include "genomagent/core/digest.hpp"
#include "genomagent/core/text.hpp"

namespace genomagent {

using nlohmann::json;

namespace {

const char* op_name(Instruction::Op op) {
  switch (op) {
    case Instruction::Op::SelectCss: return "SelectCss";
    case Instruction::Op::SelectPath: return "SelectPath";
    case Instruction::Op::Nth: return "Nth";
    case Instruction::Op::Text: return "Text";
    case Instruction::Op::Attr: return "Attr";
    case Instruction::Op::RegexCapture: return "RegexCapture";
    case Instruction::Op::First: return "First";
  }
  return "?";
}

std::optional<Instruction::Op> op_from_name(const std::string& name) {
  static const std::pair<const char*, Instruction::Op> kOps[] = {
      {"SelectCss", Instruction::Op::SelectCss},
      {"SelectPath", Instruction::Op::SelectPath},
      {"Nth", Instruction::Op::Nth},
      {"Text", Instruction::Op::Text},
      {"Attr", Instruction::Op::Attr},
      {"RegexCapture", Instruction::Op::RegexCapture},
      {"First", Instruction::Op::First},
  };
  for (const auto& [n, op] : kOps) {
    if (name == n) return op;
  }
  return std::nullopt;
}

struct ProgramLexer {
  std::string_view text;
  std::size_t pos = 0;

  void skip_separators() {
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';') {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_separators();
    return pos >= text.size();
  }

  Result<std::string> read_identifier() {
    skip_separators();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '_')) {
      ++pos;
    }
    if (pos == start) {
      return make_error(Errc::ProgramInvalid,
                        "expected instruction name at offset " + std::to_string(pos));
    }
    return std::string(text.substr(start, pos - start));
  }

  // Reads "(...)" argument lists: quoted strings and integers.
  Result<std::vector<std::string>> read_args() {
    std::vector<std::string> args;
    if (pos >= text.size() || text[pos] != '(') return args;
    ++pos;
    while (true) {
      while (pos < text.size() &&
             (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) {
        ++pos;
      }
      if (pos >= text.size()) {
        return make_error(Errc::ProgramInvalid, "unterminated argument list");
      }
      if (text[pos] == ')') {
        ++pos;
        return args;
      }
      if (text[pos] == '"' || text[pos] == '\'') {
        char quote = text[pos];
        ++pos;
        std::string value;
        while (pos < text.size() && text[pos] != quote) {
          if (text[pos] == '\\' && pos + 1 < text.size()) {
            ++pos;
            char escaped = text[pos];
            value.push_back(escaped == 'n' ? '\n' : escaped == 't' ? '\t' : escaped);
          } else {
            value.push_back(text[pos]);
          }
          ++pos;
        }
        if (pos >= text.size()) {
          return make_error(Errc::ProgramInvalid, "unterminated string argument");
        }
        ++pos;
        args.push_back(std::move(value));
      } else {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ')') ++pos;
        std::string value = trim(text.substr(start, pos - start));
        if (value.empty()) {
          return make_error(Errc::ProgramInvalid, "empty argument");
        }
        args.push_back(std::move(value));
      }
    }
  }
};

std::string strip_code_fence(std::string_view text) {
  std::string s = trim(text);
  if (s.rfind("```", 0) == 0) {
    auto first_newline = s.find('\n');
    if (first_newline != std::string::npos) s.erase(0, first_newline + 1);
    auto closing = s.rfind("```");
    if (closing != std::string::npos) s.erase(closing);
  }
  return trim(s);
}

Result<int> parse_int_arg(const std::string& value, const char* what) {
  try {
    std::size_t used = 0;
    int n = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return n;
  } catch (const std::exception&) {
    return make_error(Errc::ProgramInvalid, std::string(what) + " expects an integer, got: " + value);
  }
}

}  // namespace

std::string ExtractionProgram::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    const Instruction& ins = instructions[i];
    if (i > 0) out += ", ";
    out += op_name(ins.op);
    switch (ins.op) {
      case Instruction::Op::SelectCss:
      case Instruction::Op::SelectPath:
      case Instruction::Op::Attr: {
        std::string escaped;
        for (char c : ins.arg) {
          if (c == '"' || c == '\\') escaped.push_back('\\');
          escaped.push_back(c);
        }
        out += "(\"" + escaped + "\")";
        break;
      }
      case Instruction::Op::Nth:
        out += "(" + std::to_string(ins.number) + ")";
        break;
      case Instruction::Op::RegexCapture: {
        std::string escaped;
        for (char c : ins.arg) {
          if (c == '"' || c == '\\') escaped.push_back('\\');
          escaped.push_back(c);
        }
        out += "(\"" + escaped + "\", " + std::to_string(ins.number) + ")";
        break;
      }
      case Instruction::Op::Text:
      case Instruction::Op::First:
        break;
    }
  }
  return out;
}

Result<ExtractionProgram> parse_program(std::string_view text) {
  std::string cleaned = strip_code_fence(text);
  ProgramLexer lexer{cleaned};
  ExtractionProgram program;

  while (!lexer.done()) {
    auto name = lexer.read_identifier();
    if (!name.ok()) return name.error();
    auto op = op_from_name(name.value());
    if (!op) {
      return make_error(Errc::ProgramInvalid, "unknown instruction: " + name.value());
    }
    auto args = lexer.read_args();
    if (!args.ok()) return args.error();

    Instruction ins;
    ins.op = *op;
    const auto& a = args.value();
    switch (*op) {
      case Instruction::Op::SelectCss:
      case Instruction::Op::SelectPath:
      case Instruction::Op::Attr:
        if (a.size() != 1) {
          return make_error(Errc::ProgramInvalid,
                            std::string(op_name(*op)) + " expects exactly one argument");
        }
        ins.arg = a[0];
        break;
      case Instruction::Op::Nth: {
        if (a.size() != 1) {
          return make_error(Errc::ProgramInvalid, "Nth expects exactly one argument");
        }
        auto n = parse_int_arg(a[0], "Nth");
        if (!n.ok()) return n.error();
        ins.number = n.value();
        break;
      }
      case Instruction::Op::RegexCapture: {
        if (a.size() != 2) {
          return make_error(Errc::ProgramInvalid, "RegexCapture expects (pattern, group)");
        }
        ins.arg = a[0];
        auto g = parse_int_arg(a[1], "RegexCapture group");
        if (!g.ok()) return g.error();
        ins.number = g.value();
        break;
      }
      case Instruction::Op::Text:
      case Instruction::Op::First:
        if (!a.empty()) {
          return make_error(Errc::ProgramInvalid,
                            std::string(op_name(*op)) + " takes no arguments");
        }
        break;
    }
    program.instructions.push_back(std::move(ins));
    if (program.instructions.size() > kMaxProgramInstructions) {
      return make_error(Errc::ProgramInvalid, "program exceeds instruction limit");
    }
  }

  if (auto check = validate_program(program); !check.ok()) return check.error();
  return program;
}

Result<void> validate_program(const ExtractionProgram& program) {
  if (program.instructions.empty()) {
    return make_error(Errc::ProgramInvalid, "program is empty");
  }
  if (program.instructions.size() > kMaxProgramInstructions) {
    return make_error(Errc::ProgramInvalid, "program exceeds instruction limit");
  }
  for (const Instruction& ins : program.instructions) {
    switch (ins.op) {
      case Instruction::Op::SelectCss:
        if (!css_selector_valid(ins.arg)) {
          return make_error(Errc::ProgramInvalid, "unsupported CSS selector: " + ins.arg);
        }
        break;
      case Instruction::Op::SelectPath:
        if (ins.arg.empty() || ins.arg[0] != '$') {
          return make_error(Errc::ProgramInvalid, "JSON path must start with '$': " + ins.arg);
        }
        break;
      case Instruction::Op::Attr:
        if (ins.arg.empty()) {
          return make_error(Errc::ProgramInvalid, "Attr requires a name");
        }
        break;
      case Instruction::Op::Nth:
        if (ins.number < 0) {
          return make_error(Errc::ProgramInvalid, "Nth index must be >= 0");
        }
        break;
      case Instruction::Op::RegexCapture: {
        if (ins.arg.size() > kMaxRegexPatternLength) {
          return make_error(Errc::ProgramInvalid, "regex pattern too long");
        }
        if (ins.number < 0 || ins.number > 9) {
          return make_error(Errc::ProgramInvalid, "regex group must be in [0, 9]");
        }
        try {
          std::regex probe(ins.arg);
        } catch (const std::regex_error& e) {
          return make_error(Errc::ProgramInvalid, std::string("invalid regex: ") + e.what());
        }
        break;
      }
      case Instruction::Op::Text:
      case Instruction::Op::First:
        break;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// JSON path subset: $, .key, [N], [*]

namespace {

struct PathStep {
  enum class Kind { Key, Index, Wildcard } kind;
  std::string key;
  std::size_t index = 0;
};

Result<std::vector<PathStep>> parse_json_path(std::string_view path) {
  if (path.empty() || path[0] != '$') {
    return make_error(Errc::ProgramInvalid, "JSON path must start with '$'");
  }
  std::vector<PathStep> steps;
  std::size_t pos = 1;
  while (pos < path.size()) {
    if (path[pos] == '.') {
      ++pos;
      std::size_t start = pos;
      while (pos < path.size() && path[pos] != '.' && path[pos] != '[') ++pos;
      if (pos == start) {
        return make_error(Errc::ProgramInvalid, "empty key in JSON path");
      }
      steps.push_back({PathStep::Kind::Key, std::string(path.substr(start, pos - start)), 0});
    } else if (path[pos] == '[') {
      ++pos;
      if (pos < path.size() && path[pos] == '*') {
        ++pos;
        if (pos >= path.size() || path[pos] != ']') {
          return make_error(Errc::ProgramInvalid, "expected ']' after '*'");
        }
        ++pos;
        steps.push_back({PathStep::Kind::Wildcard, "", 0});
      } else {
        std::size_t start = pos;
        while (pos < path.size() && path[pos] != ']') ++pos;
        if (pos >= path.size()) {
          return make_error(Errc::ProgramInvalid, "unterminated index in JSON path");
        }
        std::string digits(path.substr(start, pos - start));
        ++pos;
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](unsigned char c) { return std::isdigit(c) != 0; })) {
          return make_error(Errc::ProgramInvalid, "non-numeric index in JSON path: " + digits);
        }
        steps.push_back({PathStep::Kind::Index, "", std::stoul(digits)});
      }
    } else {
      return make_error(Errc::ProgramInvalid,
                        std::string("unexpected character in JSON path: ") + path[pos]);
    }
  }
  return steps;
}

std::vector<json> apply_json_path(const json& root, const std::vector<PathStep>& steps) {
  std::vector<json> current{root};
  for (const PathStep& step : steps) {
    std::vector<json> next;
    for (const json& value : current) {
      switch (step.kind) {
        case PathStep::Kind::Key:
          if (value.is_object() && value.contains(step.key)) next.push_back(value[step.key]);
          break;
        case PathStep::Kind::Index:
          if (value.is_array() && step.index < value.size()) next.push_back(value[step.index]);
          break;
        case PathStep::Kind::Wildcard:
          if (value.is_array()) {
            for (const auto& item : value) next.push_back(item);
          } else if (value.is_object()) {
            for (const auto& [key, item] : value.items()) next.push_back(item);
          }
          break;
      }
    }
    current = std::move(next);
  }
  return current;
}

std::string json_to_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// Interpreter

namespace {

struct WorkingSet {
  std::vector<const HtmlNode*> nodes;
  std::vector<json> values;
  std::vector<std::string> strings;
  enum class Kind { Nodes, Values, Strings } kind = Kind::Strings;

  std::size_t size() const {
    switch (kind) {
      case Kind::Nodes: return nodes.size();
      case Kind::Values: return values.size();
      case Kind::Strings: return strings.size();
    }
    return 0;
  }

  void keep_only(std::size_t index) {
    switch (kind) {
      case Kind::Nodes: nodes = {nodes[index]}; break;
      case Kind::Values: values = {values[index]}; break;
      case Kind::Strings: strings = {strings[index]}; break;
    }
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    switch (kind) {
      case Kind::Nodes:
        for (const HtmlNode* node : nodes) out.push_back(text_content(*node));
        break;
      case Kind::Values:
        for (const json& value : values) out.push_back(json_to_text(value));
        break;
      case Kind::Strings:
        return strings;
    }
    return out;
  }
};

}  // namespace

Result<std::vector<std::string>> execute_program(const ExtractionProgram& program,
                                                 const std::string& body, ContentKind kind) {
  if (auto check = validate_program(program); !check.ok()) return check.error();

  std::unique_ptr<HtmlNode> dom;
  json doc;
  WorkingSet set;

  if (kind == ContentKind::Html) {
    dom = parse_html(body);
    set.kind = WorkingSet::Kind::Nodes;
    set.nodes = {dom.get()};
  } else if (kind == ContentKind::Json) {
    doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
      return make_error(Errc::ExtractionFailed, "body is not valid JSON");
    }
    set.kind = WorkingSet::Kind::Values;
    set.values = {doc};
  } else {
    set.kind = WorkingSet::Kind::Strings;
    set.strings = {body};
  }

  for (const Instruction& ins : program.instructions) {
    switch (ins.op) {
      case Instruction::Op::SelectCss: {
        if (set.kind != WorkingSet::Kind::Nodes) {
          return make_error(Errc::ExtractionFailed, "SelectCss requires an HTML working set");
        }
        std::vector<const HtmlNode*> next;
        for (const HtmlNode* node : set.nodes) {
          auto matches = select_css(*node, ins.arg);
          next.insert(next.end(), matches.begin(), matches.end());
        }
        if (next.empty()) {
          return make_error(Errc::ExtractionFailed, "selector matched nothing: " + ins.arg);
        }
        set.nodes = std::move(next);
        break;
      }
      case Instruction::Op::SelectPath: {
        if (set.kind != WorkingSet::Kind::Values) {
          return make_error(Errc::ExtractionFailed, "SelectPath requires a JSON working set");
        }
        auto steps = parse_json_path(ins.arg);
        if (!steps.ok()) return steps.error();
        std::vector<json> next;
        for (const json& value : set.values) {
          auto matched = apply_json_path(value, steps.value());
          next.insert(next.end(), matched.begin(), matched.end());
        }
        if (next.empty()) {
          return make_error(Errc::ExtractionFailed, "path matched nothing: " + ins.arg);
        }
        set.values = std::move(next);
        break;
      }
      case Instruction::Op::First:
      case Instruction::Op::Nth: {
        std::size_t index =
            ins.op == Instruction::Op::First ? 0 : static_cast<std::size_t>(ins.number);
        if (index >= set.size()) {
          return make_error(Errc::ExtractionFailed,
                            "index " + std::to_string(index) + " out of range (size " +
                                std::to_string(set.size()) + ")");
        }
        set.keep_only(index);
        break;
      }
      case Instruction::Op::Text: {
        set.strings = set.to_strings();
        set.kind = WorkingSet::Kind::Strings;
        break;
      }
      case Instruction::Op::Attr: {
        if (set.kind != WorkingSet::Kind::Nodes) {
          return make_error(Errc::ExtractionFailed, "Attr requires an HTML working set");
        }
        std::vector<std::string> values;
        for (const HtmlNode* node : set.nodes) {
          auto it = node->attrs.find(ins.arg);
          if (it != node->attrs.end()) values.push_back(it->second);
        }
        if (values.empty()) {
          return make_error(Errc::ExtractionFailed, "no node carries attribute " + ins.arg);
        }
        set.strings = std::move(values);
        set.kind = WorkingSet::Kind::Strings;
        break;
      }
      case Instruction::Op::RegexCapture: {
        std::vector<std::string> inputs = set.to_strings();
        std::regex re(ins.arg);
        std::vector<std::string> captures;
        for (std::string input : inputs) {
          if (input.size() > kMaxRegexInputLength) input.resize(kMaxRegexInputLength);
          std::smatch m;
          if (std::regex_search(input, m, re) &&
              static_cast<std::size_t>(ins.number) < m.size()) {
            captures.push_back(m[static_cast<std::size_t>(ins.number)].str());
          }
        }
        if (captures.empty()) {
          return make_error(Errc::ExtractionFailed, "regex captured nothing: " + ins.arg);
        }
        set.strings = std::move(captures);
        set.kind = WorkingSet::Kind::Strings;
        break;
      }
    }
  }

  std::vector<std::string> out = set.to_strings();
  if (out.empty()) {
    return make_error(Errc::ExtractionFailed, "program produced no values");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure fingerprints

namespace {

void collect_json_paths(const json& value, const std::string& prefix,
                        std::set<std::string>* out, int depth) {
  if (depth > 16) return;
  if (value.is_object()) {
    for (const auto& [key, child] : value.items()) {
      std::string path = prefix.empty() ? key : prefix + "." + key;
      out->insert(path);
      collect_json_paths(child, path, out, depth + 1);
    }
  } else if (value.is_array() && !value.empty()) {
    collect_json_paths(value[0], prefix + "[]", out, depth + 1);
  }
}

}  // namespace

std::string structure_fingerprint(const std::string& body, ContentKind kind) {
  std::set<std::string> paths;
  if (kind == ContentKind::Json) {
    json doc = json::parse(body, nullptr, false);
    if (!doc.is_discarded()) collect_json_paths(doc, "", &paths, 0);
  } else if (kind == ContentKind::Html) {
    auto dom = parse_html(body);
    for (auto& path : element_paths(*dom)) paths.insert(std::move(path));
  } else {
    return content_digest(body);
  }
  std::string joined;
  for (const auto& path : paths) {
    joined += path;
    joined.push_back('\n');
  }
  return content_digest(joined);
}

// ---------------------------------------------------------------------------
// ExtractionCache

std::string ExtractionCache::make_key(SourceId source, const std::string& endpoint,
                                      const std::string& fingerprint) {
  return std::string(source_name(source)) + "|" + endpoint + "|" + fingerprint;
}

std::optional<ExtractionProgram> ExtractionCache::lookup(const std::string& key) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = slots_.find(key);
  if (it == slots_.end()) return std::nullopt;
  ++it->second.hits;
  return it->second.program;
}

void ExtractionCache::store(const std::string& key, ExtractionProgram program) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = slots_.try_emplace(key);
  if (inserted) it->second.program = std::move(program);
}

std::uint64_t ExtractionCache::hit_count(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = slots_.find(key);
  return it == slots_.end() ? 0 : it->second.hits;
}

std::size_t ExtractionCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return slots_.size();
}

Result<void> ExtractionCache::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::IoError, "cannot open cache file: " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "cache file is not a JSON object");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& [key, entry] : doc.items()) {
    auto program = parse_program(entry.value("program", ""));
    if (!program.ok()) continue;  // skip entries from incompatible versions
    Slot slot;
    slot.program = std::move(program.value());
    slot.program.target_description = entry.value("target", "");
    slot.hits = entry.value("hits", 0ULL);
    slots_.emplace(key, std::move(slot));
  }
  return {};
}

Result<void> ExtractionCache::save_file(const std::filesystem::path& file) const {
  json doc = json::object();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [key, slot] : slots_) {
      doc[key] = {
          {"program", slot.program.to_text()},
          {"target", slot.program.target_description},
          {"hits", slot.hits},
      };
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file);
  if (!out) return make_error(Errc::IoError, "cannot write cache file: " + file.string());
  out << doc.dump(2) << "\n";
  return {};
}

}  // namespace genomagent
