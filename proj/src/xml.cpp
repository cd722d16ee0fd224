#include "xml.hpp"

#include <cctype>

#include "ppmbench/error.hpp"

namespace ppmbench::xml {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' || c == '.';
}

}  // namespace

void Reader::fail(const std::string& message) const {
  throw ParseError("malformed XML: " + message, pos_);
}

TokenType Reader::next() {
  while (pos_ < text_.size()) {
    // skip text content
    while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
    if (pos_ >= text_.size()) break;

    if (text_.compare(pos_, 4, "<!--") == 0) {
      std::size_t end = text_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) fail("unterminated comment");
      pos_ = end + 3;
      continue;
    }
    if (text_.compare(pos_, 2, "<?") == 0) {
      std::size_t end = text_.find("?>", pos_ + 2);
      if (end == std::string_view::npos) fail("unterminated processing instruction");
      pos_ = end + 2;
      continue;
    }
    if (text_.compare(pos_, 2, "<!") == 0) {  // DOCTYPE etc., no nested brackets expected
      std::size_t end = text_.find('>', pos_ + 2);
      if (end == std::string_view::npos) fail("unterminated declaration");
      pos_ = end + 1;
      continue;
    }
    if (text_.compare(pos_, 2, "</") == 0) {
      pos_ += 2;
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
      if (pos_ == start) fail("empty end-tag name");
      end_name_.assign(text_.substr(start, pos_ - start));
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != '>') fail("expected '>' after end tag");
      ++pos_;
      return TokenType::EndElement;
    }
    parse_tag();
    return TokenType::StartElement;
  }
  return TokenType::Eof;
}

void Reader::parse_tag() {
  ++pos_;  // '<'
  std::size_t start = pos_;
  while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
  if (pos_ == start) fail("empty tag name");
  tag_.name.assign(text_.substr(start, pos_ - start));
  tag_.attrs.clear();
  tag_.self_closing = false;

  while (true) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) fail("unterminated tag");
    if (text_[pos_] == '>') {
      ++pos_;
      return;
    }
    if (text_[pos_] == '/') {
      ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != '>') fail("expected '>' after '/'");
      ++pos_;
      tag_.self_closing = true;
      return;
    }
    std::size_t astart = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (pos_ == astart) fail("bad attribute name");
    std::string name(text_.substr(astart, pos_ - astart));
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '=' in attribute");
    ++pos_;
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) fail("expected quoted attribute value");
    char quote = text_[pos_++];
    std::size_t vstart = pos_;
    while (pos_ < text_.size() && text_[pos_] != quote) ++pos_;
    if (pos_ >= text_.size()) fail("unterminated attribute value");
    std::string value = decode_entities(text_.substr(vstart, pos_ - vstart));
    ++pos_;
    tag_.attrs.emplace_back(std::move(name), std::move(value));
  }
}

std::string Reader::decode_entities(std::string_view raw) {
  if (raw.find('&') == std::string_view::npos) return std::string(raw);
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] != '&') {
      out.push_back(raw[i++]);
      continue;
    }
    std::size_t semi = raw.find(';', i + 1);
    if (semi == std::string_view::npos) fail("unterminated entity reference");
    std::string_view ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (!ent.empty() && ent[0] == '#') {
      long code = 0;
      if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
        code = std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16);
      else
        code = std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10);
      // UTF-8 encode
      if (code < 0x80) out.push_back(static_cast<char>(code));
      else if (code < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (code >> 6)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      } else if (code < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (code >> 12)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (code >> 18)));
        out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      }
    } else {
      fail("unknown entity '&" + std::string(ent) + ";'");
    }
    i = semi + 1;
  }
  return out;
}

void Reader::skip_element(const std::string& name) {
  int depth = 1;
  while (depth > 0) {
    TokenType t = next();
    if (t == TokenType::Eof) fail("unexpected end of input inside <" + name + ">");
    if (t == TokenType::StartElement) {
      if (!tag_.self_closing) ++depth;
    } else {
      --depth;
    }
  }
}

}  // namespace ppmbench::xml
