#include "kvfile.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace gtherm {

KvFile KvFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_text(ss.str(), path);
}

KvFile KvFile::parse_text(const std::string& text, const std::string& origin) {
    KvFile kv;
    kv.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), '=', ' ');
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string value;
        std::getline(ls, value);
        auto first = value.find_first_not_of(" \t");
        if (first == std::string::npos)
            throw ConfigError("config", origin + ":" + std::to_string(lineno) +
                                            ": key '" + key + "' has no value");
        auto last = value.find_last_not_of(" \t\r");
        kv.kv_[key] = value.substr(first, last - first + 1);
    }
    return kv;
}

std::vector<std::string> KvFile::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_) out.push_back(k);
    return out;
}

std::string KvFile::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError("config", origin_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string KvFile::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KvFile::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config", origin_ + ": key '" + key + "' is not a number: '" + s + "'");
    }
}

double KvFile::get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

long long KvFile::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config", origin_ + ": key '" + key + "' is not an integer: '" + s + "'");
    }
}

long long KvFile::get_int(const std::string& key, long long dflt) const {
    return has(key) ? get_int(key) : dflt;
}

std::vector<double> KvFile::get_double_list(const std::string& key) const {
    std::string s = get_string(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (out.empty())
        throw ConfigError("config", origin_ + ": key '" + key + "' holds no numbers");
    return out;
}

void KvFile::set_double(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    kv_[key] = buf;
}

void KvFile::set_int(const std::string& key, long long value) {
    kv_[key] = std::to_string(value);
}

void KvFile::check_known(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : kv_)
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError("config", origin_ + ": unknown key '" + k + "'");
}

void KvFile::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("config", "cannot open '" + path + "' for writing");
    for (const auto& [k, v] : kv_) os << k << ' ' << v << '\n';
    if (!os) throw ConfigError("config", "write failed for '" + path + "'");
}

} // namespace gtherm
