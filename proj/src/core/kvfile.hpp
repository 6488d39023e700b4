#pragma once

#include <map>
#include <string>
#include <vector>

namespace gtherm {

// Plain key-value text files used for stack descriptions, variation
// scenarios, solver scenarios and the GreensSet manifest. One "key value"
// pair per line, '#' starts a comment, '=' between key and value is
// accepted. Unknown keys are rejected by the typed loaders so that typos
// surface instead of silently using defaults.
class KvFile {
public:
    static KvFile parse_file(const std::string& path);
    static KvFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::string& origin() const { return origin_; }
    std::vector<std::string> keys() const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long dflt) const;
    std::vector<double> get_double_list(const std::string& key) const;  // comma-separated

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    // Fails on keys outside `known` (invariant: overrides reference known keys only).
    void check_known(const std::vector<std::string>& known) const;

    void save(const std::string& path) const;

private:
    std::string origin_;
    std::map<std::string, std::string> kv_;
};

} // namespace gtherm
