// Minimal UTF-8 iteration, internal to the library.
#ifndef CMPOS_SRC_UTF8_HPP
#define CMPOS_SRC_UTF8_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace cmpos::detail {

// Decodes one codepoint starting at `pos`, advancing `pos` past it. Malformed
// sequences consume a single byte and yield U+FFFD.
inline std::uint32_t utf8_next(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(text[i]));
  };
  std::uint32_t b0 = byte(pos);
  std::size_t len;
  std::uint32_t cp;
  if (b0 < 0x80) {
    len = 1;
    cp = b0;
  } else if ((b0 >> 5) == 0x6) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 >> 4) == 0xe) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 >> 3) == 0x1e) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xfffd;
  }
  if (pos + len > text.size()) {
    ++pos;
    return 0xfffd;
  }
  for (std::size_t i = 1; i < len; ++i) {
    std::uint32_t b = byte(pos + i);
    if ((b >> 6) != 0x2) {
      ++pos;
      return 0xfffd;
    }
    cp = (cp << 6) | (b & 0x3f);
  }
  pos += len;
  return cp;
}

// Byte offset of the start of each codepoint, plus text.size() as a final
// entry; lets callers slice codepoint-aligned prefixes/suffixes.
inline std::vector<std::size_t> utf8_boundaries(std::string_view text) {
  std::vector<std::size_t> bounds;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bounds.push_back(pos);
    utf8_next(text, pos);
  }
  bounds.push_back(text.size());
  return bounds;
}

}  // namespace cmpos::detail

#endif  // CMPOS_SRC_UTF8_HPP
