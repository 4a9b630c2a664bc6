#include "gssqpe/wigner.hpp"

#include <cmath>
#include <cstdint>
#include <list>
#include <mutex>
#include <unordered_map>

#include "gssqpe/types.hpp"

namespace gssqpe {

namespace {
constexpr double kRescaleAt = 1e250;
constexpr double kRescale = 1e-250;
}  // namespace

Eigen::MatrixXd build_wigner_halfpi(int n) {
    if (n < 1) throw ConfigError("wigner: n_qubits must be >= 1");
    const int dim = n + 1;
    // a[i] = <m_{i+1}| J_+ |m_i> = sqrt((n - i)(i + 1))
    Eigen::VectorXd a(dim);
    for (int i = 0; i < dim - 1; ++i) a[i] = std::sqrt(double(n - i) * double(i + 1));
    a[dim - 1] = 0.0;

    Eigen::MatrixXd D(dim, dim);
    Eigen::VectorXd up(dim), dn(dim);
    const int mid = dim / 2;
    const int wlo = std::max(0, mid - 4);
    const int whi = std::min(dim - 1, mid + 4);

    for (int c = 0; c < dim; ++c) {
        const double two_m = 2.0 * (c - 0.5 * n);

        // Upward pass from m' = -j; at beta=pi/2 the edge value d_{-j,m} is positive,
        // so a +1 seed fixes the sign of the whole column. The pass stops just past
        // the stitch window: the classically allowed band is centered on m' = 0 for
        // every column, and running further would re-enter the forbidden region,
        // where the recursion grows again and its rescales would flush the already
        // computed band to zero.
        up[0] = 1.0;
        for (int i = 0; i + 1 < dim && i + 1 <= whi /* window top */; ++i) {
            const double prev = (i > 0) ? a[i - 1] * up[i - 1] : 0.0;
            up[i + 1] = (two_m * up[i] - prev) / a[i];
            if (std::abs(up[i + 1]) > kRescaleAt) {
                for (int t = 0; t <= i + 1; ++t) up[t] *= kRescale;
            }
        }
        // downward pass from m' = +j, stopped at the window bottom
        dn[dim - 1] = 1.0;
        for (int i = dim - 1; i > 0 && i - 1 >= wlo; --i) {
            const double next = (i < dim - 1) ? a[i] * dn[i + 1] : 0.0;
            dn[i - 1] = (two_m * dn[i] - next) / a[i - 1];
            if (std::abs(dn[i - 1]) > kRescaleAt) {
                for (int t = dim - 1; t >= i - 1; --t) dn[t] *= kRescale;
            }
        }
        // stitch where both passes are still on the wanted solution
        int im = wlo;
        double best = -1.0;
        for (int i = wlo; i <= whi; ++i) {
            const double w = std::min(std::abs(up[i]), std::abs(dn[i]));
            if (w > best) {
                best = w;
                im = i;
            }
        }
        if (!(best > 0.0)) throw NumericalError("wigner: degenerate stitch window");
        const double scale = up[im] / dn[im];

        auto col = D.col(c);
        for (int i = 0; i <= im; ++i) col[i] = up[i];
        for (int i = im + 1; i < dim; ++i) col[i] = dn[i] * scale;
        // normalize by the peak first: squared entries can underflow long before
        // the entries themselves do
        const double peak = col.cwiseAbs().maxCoeff();
        col /= peak;
        col /= col.norm();
    }
    return D;
}

struct WignerCache::Impl {
    std::mutex mtx;
    std::size_t budget = std::size_t(2) << 30;  // 2 GiB
    std::size_t used = 0;
    std::list<int> lru;  // front = most recent
    struct Entry {
        std::shared_ptr<const Eigen::MatrixXd> mat;
        std::list<int>::iterator pos;
    };
    std::unordered_map<int, Entry> map;

    static std::size_t bytes(int n) {
        const std::size_t d = std::size_t(n) + 1;
        return d * d * sizeof(double);
    }

    void evict_to_fit(std::size_t incoming) {
        while (!lru.empty() && used + incoming > budget) {
            const int victim = lru.back();
            lru.pop_back();
            used -= bytes(victim);
            map.erase(victim);
        }
    }
};

WignerCache& WignerCache::instance() {
    static WignerCache cache;
    static std::once_flag once;
    std::call_once(once, [] { cache.impl_ = std::make_shared<Impl>(); });
    return cache;
}

std::shared_ptr<const Eigen::MatrixXd> WignerCache::get(int n_qubits) {
    auto& im = *impl_;
    std::unique_lock lock(im.mtx);
    if (auto it = im.map.find(n_qubits); it != im.map.end()) {
        im.lru.erase(it->second.pos);
        im.lru.push_front(n_qubits);
        it->second.pos = im.lru.begin();
        return it->second.mat;
    }
    lock.unlock();
    auto mat = std::make_shared<const Eigen::MatrixXd>(build_wigner_halfpi(n_qubits));
    lock.lock();
    if (auto it = im.map.find(n_qubits); it != im.map.end()) return it->second.mat;
    im.evict_to_fit(Impl::bytes(n_qubits));
    im.lru.push_front(n_qubits);
    im.map.emplace(n_qubits, Impl::Entry{mat, im.lru.begin()});
    im.used += Impl::bytes(n_qubits);
    return mat;
}

void WignerCache::set_budget(std::size_t bytes) {
    auto& im = *impl_;
    std::scoped_lock lock(im.mtx);
    im.budget = bytes;
    im.evict_to_fit(0);
}

void WignerCache::clear() {
    auto& im = *impl_;
    std::scoped_lock lock(im.mtx);
    im.lru.clear();
    im.map.clear();
    im.used = 0;
}

}  // namespace gssqpe
