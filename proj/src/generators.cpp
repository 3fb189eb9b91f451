// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/generators.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include <httplib.h>

#include "slicefix/errors.hpp"
#include "slicefix/lexer.hpp"

namespace slicefix {

namespace {

using Clock = std::chrono::steady_clock;

std::string buggy_text(const std::string& id, const ModelInput& input) {
    try {
        return decode_parts(input.tokens).buggy;
    } catch (const MalformedInput& e) {
        throw GeneratorError(id, std::string("malformed model input: ") + e.what());
    }
}

void truncate_to(std::vector<CandidatePatch>& c, int k) {
    if (static_cast<int>(c.size()) > k) c.resize(static_cast<std::size_t>(k));
}

class IdentityGenerator final : public Generator {
public:
    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput& input, int) override {
        return {CandidatePatch{1, buggy_text(id, input), 1.0, name_}};
    }

private:
    std::string name_ = "identity";
};

class ReplayGenerator final : public Generator {
public:
    ReplayGenerator(std::string name, const std::string& path) : name_(std::move(name)) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open replay table " + path);
        nlohmann::json table;
        try {
            in >> table;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("replay table " + path + ": " + e.what());
        }
        if (!table.is_object()) throw ConfigError("replay table " + path + " must be a JSON object");
        for (const auto& [id, entries] : table.items()) {
            std::vector<CandidatePatch> list;
            int rank = 1;
            for (const auto& e : entries) {
                CandidatePatch c;
                c.rank = rank;
                c.generator = name_;
                if (e.is_string()) {
                    c.text = e.get<std::string>();
                    c.score = 1.0 / rank;
                } else {
                    c.text = e.at("text").get<std::string>();
                    c.score = e.contains("score") ? e.at("score").get<double>() : 1.0 / rank;
                }
                list.push_back(std::move(c));
                ++rank;
            }
            validate_candidates(list, id, static_cast<int>(list.size()));
            table_.emplace(id, std::move(list));
        }
    }

    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput&, int k) override {
        auto it = table_.find(id);
        if (it == table_.end()) return {};
        auto out = it->second;
        truncate_to(out, k);
        return out;
    }

private:
    std::string name_;
    std::map<std::string, std::vector<CandidatePatch>> table_;
};

class CachedGenerator final : public Generator {
public:
    CachedGenerator(std::string name, const std::string& path) : name_(std::move(name)) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open candidates file " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto rec = candidate_record_from_json(nlohmann::json::parse(line));
            records_.emplace(rec.id, std::move(rec));
        }
    }

    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput&, int k) override {
        auto it = records_.find(id);
        if (it == records_.end()) throw GeneratorError(id, "no cached candidates");
        if (it->second.error) throw GeneratorError(id, *it->second.error);
        auto out = it->second.candidates;
        truncate_to(out, k);
        return out;
    }

private:
    std::string name_;
    std::map<std::string, CandidateRecord> records_;
};

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& flip_tables() {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> t{
        {"eq", {{"==", "!="}, {"!=", "=="}}},
        {"rel", {{"<", "<="}, {"<=", "<"}, {">", ">="}, {">=", ">"}}},
        {"arith", {{"+", "-"}, {"-", "+"}}},
        {"logic", {{"&&", "||"}, {"||", "&&"}}},
        {"bool", {{"true", "false"}, {"false", "true"}}},
    };
    return t;
}

class MutateGenerator final : public Generator {
public:
    MutateGenerator(std::string name, std::vector<std::string> rules)
        : name_(std::move(name)), rules_(std::move(rules)) {}

    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput& input, int k) override {
        std::vector<CandidatePatch> out;
        for (auto& text : mutate_line(buggy_text(id, input), rules_)) {
            if (static_cast<int>(out.size()) >= k) break;
            const int rank = static_cast<int>(out.size()) + 1;
            out.push_back(CandidatePatch{rank, std::move(text), 1.0 / rank, name_});
        }
        return out;
    }

private:
    std::string name_;
    std::vector<std::string> rules_;
};

// --- external backends ---------------------------------------------------

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class ChildProcess {
public:
    explicit ChildProcess(std::string command) : command_(std::move(command)) {}
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ~ChildProcess() { stop(); }

    bool running() const { return pid_ > 0; }

    void start() {
        ignore_sigpipe();
        int in_pipe[2];
        int out_pipe[2];
        if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error("pipe: " + std::string(std::strerror(errno)));
        if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            throw Error("pipe: " + std::string(std::strerror(errno)));
        }
        const pid_t pid = ::fork();
        if (pid < 0) {
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
            throw Error("fork: " + std::string(std::strerror(errno)));
        }
        if (pid == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        pid_ = pid;
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
        buffer_.clear();
    }

    void stop() {
        if (to_child_ >= 0) ::close(to_child_);
        to_child_ = -1;
        if (pid_ > 0) {
            // give the child a moment to exit on EOF before killing it
            const auto deadline = Clock::now() + std::chrono::milliseconds(500);
            int status = 0;
            while (::waitpid(pid_, &status, WNOHANG) == 0) {
                if (Clock::now() >= deadline) {
                    ::kill(pid_, SIGKILL);
                    ::waitpid(pid_, &status, 0);
                    break;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(5));
            }
        }
        pid_ = -1;
        if (from_child_ >= 0) ::close(from_child_);
        from_child_ = -1;
    }

    // Returns an error message, or empty on success.
    std::string write_line(const std::string& line) {
        std::string data = line + "\n";
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                return "write to backend failed: " + std::string(std::strerror(errno));
            }
            off += static_cast<std::size_t>(n);
        }
        return {};
    }

    // Empty optional with `err` set on EOF, timeout or read error.
    std::optional<std::string> read_line(Clock::time_point deadline, std::string& err) {
        while (true) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            if (left.count() <= 0) {
                err = "backend timed out";
                return std::nullopt;
            }
            pollfd p{from_child_, POLLIN, 0};
            const int r = ::poll(&p, 1, static_cast<int>(left.count()));
            if (r < 0) {
                if (errno == EINTR) continue;
                err = "poll failed: " + std::string(std::strerror(errno));
                return std::nullopt;
            }
            if (r == 0) continue;
            char chunk[4096];
            const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                err = "read from backend failed: " + std::string(std::strerror(errno));
                return std::nullopt;
            }
            if (n == 0) {
                err = "backend closed its output";
                return std::nullopt;
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    std::string command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

class CommandGenerator final : public Generator {
public:
    CommandGenerator(std::string name, std::string command, GeneratorOptions opts)
        : name_(std::move(name)), opts_(opts), child_(std::move(command)) {}

    const std::string& name() const override { return name_; }
    bool deterministic() const override { return opts_.seed.has_value(); }

    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput& input, int k) override {
        std::lock_guard lock(mu_);
        if (!child_.running()) {
            try {
                child_.start();
            } catch (const Error& e) {
                throw GeneratorError(id, e.what());
            }
        }
        const auto deadline = Clock::now() + opts_.timeout;
        std::string err = child_.write_line(make_request(id, input, k, opts_.seed).dump());
        std::optional<std::string> line;
        if (err.empty()) line = child_.read_line(deadline, err);
        if (!line) {
            child_.stop();  // restarted on the next request
            throw GeneratorError(id, err);
        }
        nlohmann::json resp;
        try {
            resp = nlohmann::json::parse(*line);
        } catch (const nlohmann::json::exception&) {
            child_.stop();
            throw GeneratorError(id, "backend sent invalid JSON");
        }
        return parse_response(resp, id, k, name_);
    }

private:
    std::string name_;
    GeneratorOptions opts_;
    std::mutex mu_;
    ChildProcess child_;
};

class HttpGenerator final : public Generator {
public:
    HttpGenerator(std::string name, const std::string& url, GeneratorOptions opts)
        : name_(std::move(name)), opts_(opts) {
        const auto scheme = url.find("://");
        if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
            throw ConfigError("http backend needs an http:// URL, got '" + url + "'");
        }
        const auto slash = url.find('/', scheme + 3);
        host_ = url.substr(0, slash);
        path_ = slash == std::string::npos ? "/" : url.substr(slash);
    }

    const std::string& name() const override { return name_; }
    bool deterministic() const override { return opts_.seed.has_value(); }

    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput& input, int k) override {
        std::lock_guard lock(mu_);
        httplib::Client cli(host_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
        cli.set_connection_timeout(secs.count(), usecs.count());
        cli.set_read_timeout(secs.count(), usecs.count());
        cli.set_write_timeout(secs.count(), usecs.count());
        auto res = cli.Post(path_, make_request(id, input, k, opts_.seed).dump(), "application/json");
        if (!res) throw GeneratorError(id, "http request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw GeneratorError(id, "http status " + std::to_string(res->status));
        nlohmann::json resp;
        try {
            resp = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception&) {
            throw GeneratorError(id, "backend sent invalid JSON");
        }
        return parse_response(resp, id, k, name_);
    }

private:
    std::string name_;
    GeneratorOptions opts_;
    std::string host_;
    std::string path_;
    std::mutex mu_;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string::npos ? s.size() : comma;
        if (end > start) out.push_back(s.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::unique_ptr<Generator> make_cached_generator(const std::string& path, const std::string& name) {
    return std::make_unique<CachedGenerator>(name, path);
}

const std::vector<std::string>& mutation_rules() {
    static const std::vector<std::string> rules{"eq", "rel", "arith", "logic", "bool", "delete"};
    return rules;
}

std::vector<std::string> mutate_line(const std::string& buggy, const std::vector<std::string>& rules) {
    const auto toks = lex(buggy);
    std::vector<std::string> out;
    std::set<std::string> seen{join_tokens(toks)};
    auto emit = [&](std::vector<std::string> texts) {
        auto s = join_tokens(texts);
        if (seen.insert(s).second) out.push_back(std::move(s));
    };
    std::vector<std::string> texts;
    for (const auto& t : toks) texts.push_back(t.text);

    for (const auto& rule : rules) {
        if (rule == "delete") {
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (toks[i].kind != TokenKind::Identifier && toks[i].kind != TokenKind::Literal &&
                    toks[i].kind != TokenKind::Operator) {
                    continue;
                }
                if (toks[i].kind == TokenKind::Operator &&
                    std::string_view("(){}[];,.").find(toks[i].text) != std::string_view::npos) {
                    continue;
                }
                auto copy = texts;
                copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(i));
                emit(std::move(copy));
            }
            continue;
        }
        const auto it = flip_tables().find(rule);
        if (it == flip_tables().end()) throw ConfigError("unknown mutation rule '" + rule + "'");
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].kind == TokenKind::Unknown) continue;
            for (const auto& [from, to] : it->second) {
                if (toks[i].text != from) continue;
                auto copy = texts;
                copy[i] = to;
                emit(std::move(copy));
            }
        }
    }
    return out;
}

std::unique_ptr<Generator> make_generator(const std::string& spec, const GeneratorOptions& opts) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "identity" && colon == std::string::npos) return std::make_unique<IdentityGenerator>();
    if (kind == "mutate") {
        auto rules = colon == std::string::npos ? mutation_rules() : split_commas(arg);
        if (rules.empty()) throw ConfigError("mutate spec lists no rules");
        for (const auto& r : rules) {
            if (std::find(mutation_rules().begin(), mutation_rules().end(), r) == mutation_rules().end()) {
                throw ConfigError("unknown mutation rule '" + r + "'");
            }
        }
        return std::make_unique<MutateGenerator>(spec, std::move(rules));
    }
    if (arg.empty()) throw ConfigError("invalid generator spec '" + spec + "'");
    if (kind == "replay") return std::make_unique<ReplayGenerator>(spec, arg);
    if (kind == "cached") return std::make_unique<CachedGenerator>(spec, arg);
    if (kind == "cmd") return std::make_unique<CommandGenerator>(spec, arg, opts);
    if (kind == "http") return std::make_unique<HttpGenerator>(spec, arg, opts);
    throw ConfigError("invalid generator spec '" + spec + "'");
}

nlohmann::ordered_json make_request(const std::string& id, const ModelInput& input, int k,
                                    std::optional<std::uint64_t> seed) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["input_tokens"] = input.tokens;
    j["k"] = k;
    if (seed) j["seed"] = *seed;
    return j;
}

void validate_candidates(const std::vector<CandidatePatch>& cands, const std::string& id, int k) {
    if (static_cast<int>(cands.size()) > k) {
        throw GeneratorError(id, std::to_string(cands.size()) + " candidates exceed k=" + std::to_string(k));
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].rank != static_cast<int>(i) + 1) {
            throw GeneratorError(id, "candidate " + std::to_string(i) + " has rank " +
                                         std::to_string(cands[i].rank) + ", expected " + std::to_string(i + 1));
        }
        if (i > 0 && cands[i].score > cands[i - 1].score) {
            throw GeneratorError(id, "score increases at rank " + std::to_string(i + 1));
        }
    }
}

std::vector<CandidatePatch> parse_response(const nlohmann::json& response, const std::string& id, int k,
                                           const std::string& generator) {
    if (!response.is_object()) throw GeneratorError(id, "response is not an object");
    if (!response.contains("id") || response["id"] != id) {
        throw GeneratorError(id, "response id mismatch");
    }
    if (response.contains("error")) {
        throw GeneratorError(id, "backend error: " + response["error"].dump());
    }
    if (!response.contains("candidates") || !response["candidates"].is_array()) {
        throw GeneratorError(id, "response lacks a candidates array");
    }
    std::vector<CandidatePatch> out;
    for (const auto& c : response["candidates"]) {
        if (!c.is_object() || !c.contains("rank") || !c["rank"].is_number_integer() || !c.contains("text") ||
            !c["text"].is_string() || !c.contains("score") || !c["score"].is_number()) {
            throw GeneratorError(id, "candidate needs integer rank, string text and numeric score");
        }
        out.push_back(CandidatePatch{c["rank"].get<int>(), c["text"].get<std::string>(), c["score"].get<double>(),
                                     generator});
    }
    validate_candidates(out, id, k);
    return out;
}

nlohmann::ordered_json to_json(const CandidateRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    if (r.error) {
        j["error"] = *r.error;
        return j;
    }
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : r.candidates) {
        j["candidates"].push_back({{"rank", c.rank}, {"text", c.text}, {"score", c.score}, {"generator", c.generator}});
    }
    return j;
}

CandidateRecord candidate_record_from_json(const nlohmann::json& j) {
    CandidateRecord r;
    r.id = j.at("id").get<std::string>();
    if (j.contains("error")) {
        r.error = j["error"].get<std::string>();
        return r;
    }
    for (const auto& c : j.at("candidates")) {
        r.candidates.push_back(CandidatePatch{c.at("rank").get<int>(), c.at("text").get<std::string>(),
                                              c.at("score").get<double>(), c.value("generator", "")});
    }
    return r;
}

}  // namespace slicefix
