#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

// Shared plumbing for the sweep executable: grid grammar, CSV assembly, and
// an index-ordered parallel map. Everything here is deterministic; in
// particular the bytes a sweep produces never depend on how many workers
// computed it, because results are collected by grid index rather than by
// completion order.

namespace dpskr::sweep {

// Accepted forms:
//   "start:stop:points"      linear grid, both ends included
//   "log:start:stop:points"  log-spaced grid, requires 0 < start
//   "x"                      single point
// points must be a positive integer; points == 1 requires start == stop
// (so "6:6:1" is the canonical one-point spelling) and points >= 2 requires
// start < stop. Anything else throws std::invalid_argument.
std::vector<double> parse_grid(const std::string& spec);

// Field formatting used for every CSV number: printf "%.17g", enough digits
// to round-trip a double and stable across runs.
std::string format_field(double x);

// Joins fields with commas. No quoting: fields never contain commas here.
std::string join_row(const std::vector<std::string>& fields);

// Full CSV document: one "# " line per comment, one header row naming the
// columns, then the data rows. Returned as a single string so callers can
// compare documents without touching the filesystem.
std::string assemble_csv(const std::vector<std::string>& comments,
                         const std::vector<std::string>& columns,
                         const std::vector<std::string>& rows);

// An explicit path is used verbatim. Otherwise default_name lands in
// $DPSKR_OUTPUT_DIR when that is set and nonempty, else in the working
// directory.
std::string resolve_output_path(const std::string& explicit_path,
                                const std::string& default_name);

// Truncating write; throws std::invalid_argument when the path cannot be
// opened or written (a bad output location is a configuration error).
void write_file(const std::string& path, const std::string& text);

// Evaluates fn(0..count-1) on up to `workers` threads (workers <= 0 means
// hardware concurrency) and returns the results indexed by input position.
// fn must be safe to call concurrently on distinct indices. The first
// exception thrown by any worker is rethrown on the calling thread.
template <typename F>
auto parallel_map(std::size_t count, int workers, F&& fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
    using T = decltype(fn(std::size_t{0}));
    std::vector<T> out(count);
    if (count == 0) return out;

    std::size_t n_threads = workers > 0
                                ? static_cast<std::size_t>(workers)
                                : std::max(1u, std::thread::hardware_concurrency());
    if (n_threads > count) n_threads = count;

    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> bail{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto body = [&] {
        while (!bail.load(std::memory_order_relaxed)) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                bail.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace dpskr::sweep
