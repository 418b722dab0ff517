#include "leakhunt/util.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace leakhunt {

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("LEAKHUNT_LOG");
        if (env == nullptr) return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::Error;
        if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    static std::mutex mtx;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mtx);
    std::fprintf(stderr, "[leakhunt:%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

std::string fmt_num(scalar_t v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

std::string fmt_num_exact(scalar_t v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace leakhunt
