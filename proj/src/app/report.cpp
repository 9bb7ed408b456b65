#include "hslab/app/report.hpp"
#include "hslab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hslab::app {

namespace {

void put_number(std::string& out, double x) {
    if (!std::isfinite(x)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

void emit(std::string& out, const Json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            emit(out, it.value(), depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            emit(out, j[i], depth + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case Json::value_t::number_float: put_number(out, j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

} // namespace

std::string dump_json(const Json& j) {
    std::string out;
    emit(out, j, 0);
    out += '\n';
    return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

OutputSet::~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
}

std::filesystem::path OutputSet::write(const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    const auto final_path = dir_ / name;
    const auto tmp = dir_ / (name + ".partial");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) {
            std::filesystem::remove(tmp, ec);
            throw Error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place: " + final_path.string());
    }
    files_.push_back(final_path);
    return final_path;
}

} // namespace hslab::app
