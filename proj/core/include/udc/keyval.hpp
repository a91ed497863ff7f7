#pragma once

#include <map>
#include <string>
#include <vector>

namespace udc {

// key=value text config. '#' starts a comment, blank lines are skipped,
// whitespace around key and value is trimmed. Parse failures throw IoError
// with the 1-based line number.
class KeyVal {
 public:
  static KeyVal from_file(const std::string& path);
  static KeyVal from_string(const std::string& text,
                            const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  // Typed getters; the _or forms fall back when the key is absent.
  // Value conversion failures throw IoError naming key and line.
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const;
  // Comma-separated list of reals.
  std::vector<double> get_double_list(const std::string& key) const;

  // Inserts or overwrites, e.g. for CLI --set key=value overrides.
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::string> kv_;
  std::map<std::string, int> lines_;
  std::string origin_;

  const std::string& raw(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;
};

}  // namespace udc
