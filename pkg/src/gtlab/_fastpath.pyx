# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bitmask reimplementation of the strategies for exhaustive sweeps.

Mirrors the recorded drivers decision for decision; sweep() cross-checks
every mask against ground truth, so any drift from the reference
implementation surfaces as an AssertionError, not a silent wrong count.
"""

ctypedef long long i64


cdef extern from *:
    int __builtin_popcountll(unsigned long long x)


cdef int _pool_size(int i):
    if i == 0:
        return 1
    if i == 1:
        return 2
    return 3 << (i - 2)


cdef int _binary(int* items, int m, i64 defect, i64* good, i64* bad):
    cdef int tests = 0, half, i
    cdef i64 pool
    while m > 1:
        half = (m + 1) // 2
        pool = 0
        for i in range(half):
            pool |= (<i64>1) << items[i]
        tests += 1
        if pool & defect:
            m = half
        else:
            good[0] |= pool
            items += half
            m -= half
    bad[0] |= (<i64>1) << items[0]
    return tests


cdef int _scan(int* items, int m, i64 defect, i64* good, i64* bad):
    # Tests until the first hit; the last item is inferred when all
    # predecessors came back clean.
    cdef int tests = 0, i
    cdef i64 bit
    for i in range(m):
        if i == m - 1:
            bad[0] |= (<i64>1) << items[i]
            return tests
        bit = (<i64>1) << items[i]
        tests += 1
        if bit & defect:
            bad[0] |= bit
            return tests
        good[0] |= bit
    return tests


cdef int _quarter(int* items, int m, int k, i64 defect, i64* good, i64* bad):
    cdef int tests = 0, start, size, j, p
    cdef i64 pool
    cdef int sizes[4]
    if m == 1:
        bad[0] |= (<i64>1) << items[0]
        return 0
    if m <= 3:
        return _scan(items, m, defect, good, bad)
    sizes[0] = 1 << (k - 2)
    sizes[1] = 1 << (k - 2)
    sizes[2] = 1 << (k - 3)
    sizes[3] = 1 << (k - 3)
    start = 0
    for j in range(4):
        size = sizes[j]
        if size > m - start:
            size = m - start
        if start + size >= m:
            # Last nonempty subset: everything before it was clean, so it
            # holds the defective and skips its own group test.
            return tests + _binary(items + start, size, defect, good, bad)
        pool = 0
        for p in range(start, start + size):
            pool |= (<i64>1) << items[p]
        tests += 1
        if pool & defect:
            return tests + _binary(items + start, size, defect, good, bad)
        good[0] |= pool
        start += size
    return tests


cdef int _compact(int* items, int m, i64 resolved):
    cdef int w = 0, i
    for i in range(m):
        if not (resolved >> items[i]) & 1:
            items[w] = items[i]
            w += 1
    return w


cdef int _zd(int* items, int m, i64 defect, i64* good, i64* bad):
    cdef int tests = 0, k = 0, psize, i
    cdef i64 pool
    if m == 0:
        return 0
    while 3 * (1 << k) < 4 * m:
        k += 1
    while m > 0:
        psize = _pool_size(k)
        if psize > m:
            psize = m
        pool = 0
        for i in range(psize):
            pool |= (<i64>1) << items[i]
        tests += 1
        if not pool & defect:
            good[0] |= pool
            items += psize
            m -= psize
            k += 1
        else:
            tests += _quarter(items, psize, k, defect, good, bad)
            if k > 0:
                k -= 1
            m = _compact(items, m, good[0] | bad[0])
    return tests


cdef int _zu(int* items, int m, i64 defect, i64* good, i64* bad):
    cdef int tests = 0, k = 0, streak = 0, flag = 0, psize, i, hits
    cdef i64 pool, bit
    while m > 0:
        if streak == 6 and m > _pool_size(k):
            pool = 0
            for i in range(m):
                pool |= (<i64>1) << items[i]
            tests += 1
            if not pool & defect:
                good[0] |= pool
                return tests
        psize = _pool_size(k)
        if psize > m:
            psize = m
        pool = 0
        for i in range(psize):
            pool |= (<i64>1) << items[i]
        tests += 1
        if not pool & defect:
            good[0] |= pool
            items += psize
            m -= psize
            k += 1
            streak += 1
            continue
        if psize == 1:
            bad[0] |= pool
            if k > 0:
                k -= 1
            streak = 0
            flag = 0
        elif k == 1:
            hits = 0
            for i in range(2):
                bit = (<i64>1) << items[i]
                tests += 1
                if bit & defect:
                    bad[0] |= bit
                    hits += 1
                else:
                    good[0] |= bit
            if hits == 2:
                k = 0
                streak = 0
                flag = 0
            else:
                k = 2
                streak += 1
                flag = 1
        elif flag and k == 2:
            for i in range(psize):
                bit = (<i64>1) << items[i]
                tests += 1
                if bit & defect:
                    bad[0] |= bit
                else:
                    good[0] |= bit
            k = 1
            streak = 0
            flag = 0
        else:
            tests += _quarter(items, psize, k, defect, good, bad)
            k -= 1
            streak = 0
            flag = 0
        m = _compact(items, m, good[0] | bad[0])
    return tests


cdef int _individual(int* items, int m, i64 defect, i64* good, i64* bad):
    cdef int i
    cdef i64 bit
    for i in range(m):
        bit = (<i64>1) << items[i]
        if bit & defect:
            bad[0] |= bit
        else:
            good[0] |= bit
    return m


cdef int _zc(int* items, int n, i64 defect, i64* good, i64* bad) except -1:
    cdef int tests = 0, n1, n2, i, j, a1 = 0, a2 = 0, mm, w
    cdef i64 pool, bit
    cdef int merged[64]
    cdef int target[64]
    cdef int contq[4]
    cdef int conts[4]
    n1 = n // 4
    for i in range(4 * n1, n):
        bit = (<i64>1) << items[i]
        tests += 1
        if bit & defect:
            bad[0] |= bit
        else:
            good[0] |= bit
    if n1 == 0:
        return tests
    for j in range(4):
        pool = 0
        for i in range(j * n1, (j + 1) * n1):
            pool |= (<i64>1) << items[i]
        tests += 1
        if pool & defect:
            contq[a1] = j
            a1 += 1
        else:
            good[0] |= pool
    if a1 == 0:
        return tests
    if a1 == 1:
        mm = 0
        for i in range(contq[0] * n1, (contq[0] + 1) * n1):
            merged[mm] = items[i]
            mm += 1
        return tests + _zd(merged, mm, defect, good, bad)
    if a1 >= 3:
        mm = 0
        for j in range(a1):
            for i in range(contq[j] * n1, (contq[j] + 1) * n1):
                merged[mm] = items[i]
                mm += 1
        return tests + _zu(merged, mm, defect, good, bad)
    mm = 0
    for j in range(2):
        for i in range(contq[j] * n1, (contq[j] + 1) * n1):
            merged[mm] = items[i]
            mm += 1
    n2 = mm // 4
    for i in range(4 * n2, mm):
        bit = (<i64>1) << merged[i]
        tests += 1
        if bit & defect:
            bad[0] |= bit
        else:
            good[0] |= bit
    if n2 == 0:
        return tests
    for j in range(4):
        pool = 0
        for i in range(j * n2, (j + 1) * n2):
            pool |= (<i64>1) << merged[i]
        tests += 1
        if pool & defect:
            conts[a2] = j
            a2 += 1
        else:
            good[0] |= pool
    if a2 == 0:
        raise AssertionError("both contaminated quarters tested clean")
    w = 0
    for j in range(a2):
        for i in range(conts[j] * n2, (conts[j] + 1) * n2):
            target[w] = merged[i]
            w += 1
    if a2 <= 2:
        return tests + _zd(target, w, defect, good, bad)
    return tests + _zu(target, w, defect, good, bad)


cdef int _dispatch(int alg, int* buf, int n, i64 defect, i64* good, i64* bad) except -1:
    if alg == 0:
        return _individual(buf, n, defect, good, bad)
    if alg == 1:
        return _zd(buf, n, defect, good, bad)
    if alg == 2:
        return _zu(buf, n, defect, good, bad)
    if alg == 3:
        return _zc(buf, n, defect, good, bad)
    raise ValueError("unknown algorithm id %d" % alg)


def count_run(int alg, int n, long long defective_mask):
    cdef int buf[64]
    cdef i64 good = 0, bad = 0
    cdef int i, tests
    if not 0 <= n <= 62:
        raise ValueError("compiled kernel handles 0 <= n <= 62")
    for i in range(n):
        buf[i] = i
    tests = _dispatch(alg, buf, n, defective_mask, &good, &bad)
    return tests, good, bad


def sweep(int alg, int n):
    cdef int buf[64]
    cdef i64 good, bad, mask, full
    cdef int i, d, tests
    if not 0 <= n <= 24:
        raise ValueError("exhaustive sweep handles 0 <= n <= 24")
    full = ((<i64>1) << n) - 1
    worst = [-1] * (n + 1)
    argmax = [0] * (n + 1)
    for mask in range(full + 1):
        for i in range(n):
            buf[i] = i
        good = 0
        bad = 0
        tests = _dispatch(alg, buf, n, mask, &good, &bad)
        if bad != mask or good != (full & ~mask):
            raise AssertionError(
                "algorithm %d misclassified mask %d at n=%d" % (alg, mask, n)
            )
        d = __builtin_popcountll(<unsigned long long>mask)
        if tests > worst[d]:
            worst[d] = tests
            argmax[d] = <long long>mask
    return worst, argmax
