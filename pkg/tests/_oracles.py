"""Independent brute-force oracles used to cross-check the metric code.

Everything here works in exact Fraction arithmetic and enumerates
confusion cells directly, cell by cell, without sharing any code with the
implementation under test.
"""

from fractions import Fraction


def brute_em(gold_rows, pred_rows):
    """gold_rows/pred_rows: list of equal-length boolean tuples."""
    hits = 0
    for g, p in zip(gold_rows, pred_rows):
        if all(gb == pb for gb, pb in zip(g, p)):
            hits += 1
    return Fraction(hits, len(gold_rows))


def brute_hamming(gold_rows, pred_rows):
    mismatched = 0
    cells = 0
    for g, p in zip(gold_rows, pred_rows):
        for gb, pb in zip(g, p):
            cells += 1
            if gb != pb:
                mismatched += 1
    return Fraction(mismatched, cells)


def brute_label_counts(gold_rows, pred_rows, j):
    tp = fp = fn = tn = 0
    for g, p in zip(gold_rows, pred_rows):
        if g[j] and p[j]:
            tp += 1
        elif not g[j] and p[j]:
            fp += 1
        elif g[j] and not p[j]:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def brute_prf(tp, fp, fn):
    precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else Fraction(0)
    )
    return precision, recall, f1


def brute_macro_micro(gold_rows, pred_rows):
    n_labels = len(gold_rows[0])
    f1_sum = Fraction(0)
    tp = fp = fn = 0
    per_label = []
    for j in range(n_labels):
        jtp, jfp, jfn, _ = brute_label_counts(gold_rows, pred_rows, j)
        prf = brute_prf(jtp, jfp, jfn)
        per_label.append(prf)
        f1_sum += prf[2]
        tp, fp, fn = tp + jtp, fp + jfp, fn + jfn
    macro = f1_sum / n_labels
    micro = brute_prf(tp, fp, fn)[2]
    return per_label, macro, micro


def brute_fleiss(counts):
    """counts: N x k integer matrix of per-item category counts."""
    n = sum(counts[0])
    n_items = len(counts)
    p_bar = Fraction(0)
    for row in counts:
        agree = sum(c * c for c in row) - n
        p_bar += Fraction(agree, n * (n - 1))
    p_bar /= n_items
    if p_bar == 1:
        return Fraction(1)
    k = len(counts[0])
    p_e = Fraction(0)
    for j in range(k):
        total = sum(row[j] for row in counts)
        p_e += Fraction(total, n_items * n) ** 2
    return (p_bar - p_e) / (1 - p_e)
