#include "lsm/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "lsm/errors.hpp"

namespace lsm::kern {

#ifdef LSM_HAVE_AVX2
namespace detail {
const Ops* avx2_ops();
}
#endif

const Ops* avx2() {
#ifdef LSM_HAVE_AVX2
    if (__builtin_cpu_supports("avx2"))
        return detail::avx2_ops();
#endif
    return nullptr;
}

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
    if (const char* env = std::getenv("LSM_KERNELS")) {
        const std::string name(env);
        if (name == "scalar")
            return &scalar();
        if (name == "avx2") {
            if (const Ops* ops = avx2())
                return ops;
            throw ConfigError("LSM_KERNELS=avx2 but AVX2 is unavailable");
        }
        if (name != "auto" && !name.empty())
            throw ConfigError("unknown LSM_KERNELS value '" + name + "'");
    }
    if (const Ops* ops = avx2())
        return ops;
    return &scalar();
}

} // namespace

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = pick_default();
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

void select(const std::string& name) {
    if (name == "auto") {
        g_active.store(nullptr, std::memory_order_release);
        if (std::getenv("LSM_KERNELS") == nullptr)
            g_active.store(avx2() ? avx2() : &scalar(), std::memory_order_release);
        return;
    }
    if (name == "scalar") {
        g_active.store(&scalar(), std::memory_order_release);
        return;
    }
    if (name == "avx2") {
        if (const Ops* ops = avx2()) {
            g_active.store(ops, std::memory_order_release);
            return;
        }
        throw ConfigError("avx2 kernels are unavailable on this machine");
    }
    throw ConfigError("unknown kernel variant '" + name + "' (want auto|scalar|avx2)");
}

} // namespace lsm::kern
