#pragma once

#include <csignal>
#include <cstring>
#include <chrono>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <asl/arith.hpp>
#include <asl/errors.hpp>
#include <asl/solver.hpp>

// SMT-LIB2 emission and a one-shot child-process client. The script pins
// logic LIA and adds a >= 0 side condition for every variable, so external
// answers line up with the builtin natural-number semantics.

namespace asl {

inline std::string smt_term(const Term& t) {
    std::vector<std::string> parts;
    for (const auto& [x, c] : t.parts)
        parts.push_back(c == 1 ? x : "(* " + std::to_string(c) + " " + x + ")");
    if (t.k != 0 || parts.empty()) parts.push_back(std::to_string(t.k));
    if (parts.size() == 1) return parts[0];
    std::string s = "(+";
    for (const auto& p : parts) s += " " + p;
    return s + ")";
}

inline std::string smt_atom(const LinAtom& a) {
    std::string l = smt_term(a.lhs), r = smt_term(a.rhs);
    switch (a.rel) {
    case Rel::Eq: return "(= " + l + " " + r + ")";
    case Rel::Ne: return "(not (= " + l + " " + r + "))";
    case Rel::Le: return "(<= " + l + " " + r + ")";
    case Rel::Lt: return "(< " + l + " " + r + ")";
    }
    return "";
}

inline std::string smt_expr(const BoolExprPtr& e) {
    switch (e->kind) {
    case BoolExpr::K::Atom: return smt_atom(e->atom);
    case BoolExpr::K::And: {
        if (e->kids.empty()) return "true";
        std::string s = "(and";
        for (const auto& k : e->kids) s += " " + smt_expr(k);
        return s + ")";
    }
    case BoolExpr::K::Or: {
        if (e->kids.empty()) return "false";
        std::string s = "(or";
        for (const auto& k : e->kids) s += " " + smt_expr(k);
        return s + ")";
    }
    }
    return "";
}

inline std::string to_smtlib(const ArithSentence& s) {
    std::string out = "(set-logic LIA)\n";
    for (const auto& x : s.exists) {
        out += "(declare-const " + x + " Int)\n";
        out += "(assert (>= " + x + " 0))\n";
    }
    std::string body = smt_expr(s.body);
    if (!s.forall.empty()) {
        std::string binders, guards;
        for (const auto& z : s.forall) {
            binders += "(" + z + " Int) ";
            guards += " (>= " + z + " 0)";
        }
        binders.pop_back();
        body = "(forall (" + binders + ") (=> (and" + guards + ") " + body + "))";
    }
    out += "(assert " + body + ")\n(check-sat)\n";
    if (!s.exists.empty()) {
        out += "(get-value (";
        for (size_t i = 0; i < s.exists.size(); ++i)
            out += (i ? " " : "") + s.exists[i];
        out += "))\n";
    }
    return out;
}

namespace detail {

struct ProcessReply {
    std::string out;
    bool timed_out = false;
};

// Feed `input` to `cmd` under /bin/sh and collect standard output until the
// process exits or the deadline passes; on timeout the child is killed.
inline ProcessReply run_process(const std::string& cmd, const std::string& input,
                                unsigned timeout_ms) {
    static bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;

    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
        throw backend_error("cannot create pipes for solver process");
    pid_t pid = ::fork();
    if (pid < 0) throw backend_error("cannot fork solver process");
    if (pid == 0) {
        ::setpgid(0, 0); // own group, so a timeout kill reaps grandchildren too
        ::dup2(in_pipe[0], 0);
        ::dup2(out_pipe[1], 1);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
        _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);

    size_t off = 0;
    while (off < input.size()) {
        ssize_t n = ::write(in_pipe[1], input.data() + off, input.size() - off);
        if (n <= 0) break; // child may exit without reading everything
        off += static_cast<size_t>(n);
    }
    ::close(in_pipe[1]);

    ProcessReply reply;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    char buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left < 0) left = 0;
        struct pollfd pfd = {out_pipe[0], POLLIN, 0};
        int pr = ::poll(&pfd, 1, static_cast<int>(left));
        if (pr == 0) {
            reply.timed_out = true;
            break;
        }
        if (pr < 0) break;
        ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
        if (n <= 0) break;
        reply.out.append(buf, static_cast<size_t>(n));
    }
    ::close(out_pipe[0]);
    if (reply.timed_out) ::kill(-pid, SIGKILL);
    int st = 0;
    ::waitpid(pid, &st, 0);
    return reply;
}

inline std::vector<std::string> sexp_tokens(const std::string& s) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == ')') {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
            toks.push_back(std::string(1, ch));
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

// ((x 0) (y 2)) possibly spread over lines; negative values are protocol
// violations because every variable carries a >= 0 assertion.
inline Valuation parse_model(const std::string& text) {
    auto toks = sexp_tokens(text);
    Valuation m;
    size_t i = 0;
    auto need = [&](const std::string& t) {
        if (i >= toks.size() || toks[i] != t)
            throw backend_error("malformed model from solver: " + text);
        ++i;
    };
    need("(");
    while (i < toks.size() && toks[i] == "(") {
        ++i;
        if (i + 1 >= toks.size()) throw backend_error("malformed model from solver: " + text);
        std::string name = toks[i++];
        std::string val = toks[i++];
        if (val == "(") throw backend_error("non-numeral model value from solver: " + text);
        if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos)
            throw backend_error("non-natural model value from solver: " + val);
        m[name] = std::stoull(val);
        need(")");
    }
    need(")");
    return m;
}

} // namespace detail

// One query per child process; spawn and protocol failures throw, a timeout
// degrades to Unknown so callers can fall back or report honestly.
inline SolveResult smt_backend_check(const ArithSentence& s, const std::string& solver_cmd,
                                     unsigned timeout_ms = 30000) {
    auto reply = detail::run_process(solver_cmd, to_smtlib(s), timeout_ms);
    if (reply.timed_out) return {Tri::Unknown, {}};
    size_t eol = reply.out.find('\n');
    std::string first = reply.out.substr(0, eol);
    while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back())))
        first.pop_back();
    if (first == "unsat") return {Tri::Unsat, {}};
    if (first == "unknown") return {Tri::Unknown, {}};
    if (first != "sat")
        throw backend_error("unexpected solver output: " +
                            (reply.out.empty() ? std::string("<no output>") : first));
    if (s.exists.empty()) return {Tri::Sat, {}};
    std::string rest = eol == std::string::npos ? "" : reply.out.substr(eol + 1);
    Valuation m = detail::parse_model(rest);
    Valuation out;
    for (const auto& x : s.exists) {
        auto it = m.find(x);
        if (it == m.end()) throw backend_error("solver model is missing variable " + x);
        out[x] = it->second;
    }
    return {Tri::Sat, out};
}

} // namespace asl
