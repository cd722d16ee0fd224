#pragma once

// Minimal XML pull reader, enough for the XES core subset: elements with
// attributes, self-closing tags, comments, processing instructions, DOCTYPE,
// character/entity references in attribute values. Text content is skipped.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ppmbench::xml {

struct Tag {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  bool self_closing = false;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return &v;
    return nullptr;
  }
};

enum class TokenType { StartElement, EndElement, Eof };

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Advances to the next start/end element, skipping everything else.
  TokenType next();

  const Tag& tag() const { return tag_; }          // valid after StartElement
  const std::string& end_name() const { return end_name_; }  // valid after EndElement
  std::size_t position() const { return pos_; }

  // Skips the remainder of the current element (after its StartElement token).
  void skip_element(const std::string& name);

 private:
  void parse_tag();
  std::string decode_entities(std::string_view raw);
  [[noreturn]] void fail(const std::string& message) const;

  std::string_view text_;
  std::size_t pos_ = 0;
  Tag tag_;
  std::string end_name_;
};

}  // namespace ppmbench::xml
