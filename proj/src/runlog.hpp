#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace roadfirst {

// Machine-readable run log: JSON lines, one event per action. Events carry
// no timestamps so identical runs produce identical logs.
class RunLog {
public:
    RunLog() = default;

    explicit RunLog(const std::filesystem::path& path) {
        out_.open(path, std::ios::binary);
        if (!out_) throw IoError("cannot open run log: " + path.string());
    }

    void event(const std::string& kind, nlohmann::json detail) {
        nlohmann::json j{{"event", kind}};
        j.update(detail);
        std::lock_guard<std::mutex> lock(mutex_);
        events_.push_back(j);
        if (out_.is_open()) {
            out_ << j.dump() << '\n';
            out_.flush();
        }
    }

    const std::vector<nlohmann::json>& events() const { return events_; }

private:
    std::mutex mutex_;
    std::ofstream out_;
    std::vector<nlohmann::json> events_;
};

}  // namespace roadfirst
