#include "udc/keyval.hpp"

#include <fstream>
#include <sstream>

#include "udc/errors.hpp"

namespace udc {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyVal KeyVal::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

KeyVal KeyVal::from_string(const std::string& text, const std::string& origin) {
  KeyVal out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw IoError(origin + ":" + std::to_string(lineno) +
                    ": expected key=value, got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw IoError(origin + ":" + std::to_string(lineno) + ": empty key");
    out.kv_[key] = val;
    out.lines_[key] = lineno;
  }
  return out;
}

bool KeyVal::has(const std::string& key) const { return kv_.count(key) != 0; }

const std::string& KeyVal::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw IoError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

void KeyVal::fail(const std::string& key, const std::string& why) const {
  auto ln = lines_.find(key);
  std::string loc = origin_;
  if (ln != lines_.end()) loc += ":" + std::to_string(ln->second);
  throw IoError(loc + ": key '" + key + "' " + why);
}

double KeyVal::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) fail(key, "has trailing junk in '" + v + "'");
    return d;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "is not a real number: '" + v + "'");
  }
}

double KeyVal::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyVal::get_int(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    size_t pos = 0;
    int i = std::stoi(v, &pos);
    if (pos != v.size()) fail(key, "has trailing junk in '" + v + "'");
    return i;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "is not an integer: '" + v + "'");
  }
}

int KeyVal::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::string KeyVal::get_string(const std::string& key) const {
  return raw(key);
}

std::string KeyVal::get_string_or(const std::string& key,
                                  const std::string& fallback) const {
  return has(key) ? kv_.at(key) : fallback;
}

std::vector<double> KeyVal::get_double_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(key, "has a non-numeric list item: '" + item + "'");
    }
  }
  if (out.empty()) fail(key, "is an empty list");
  return out;
}

void KeyVal::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

}  // namespace udc
