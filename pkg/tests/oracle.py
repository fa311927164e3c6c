"""Naive reference implementations the tests compare against.

Written from the matching rules directly (character loop, token lists,
sliding windows, full rescans per k); shares no code with the package.
"""
import string
import unicodedata


def naive_tokens(text):
    text = text.lower()
    kept = "".join(
        ch for ch in text if not (ch in string.punctuation or unicodedata.category(ch).startswith("P"))
    )
    return [t for t in kept.split() if t not in ("a", "an", "the")]


def naive_contains(passage, answer):
    p, a = naive_tokens(passage), naive_tokens(answer)
    assert a, "oracle called with an empty answer"
    return any(p[i:i + len(a)] == a for i in range(len(p) - len(a) + 1))


def naive_rerank(texts, answers):
    """Stable partition of positions by "contains any non-empty answer"."""
    answers = [a for a in answers if naive_tokens(a)]
    hit = [any(naive_contains(t, a) for a in answers) for t in texts]
    return [i for i in range(len(texts)) if hit[i]] + [i for i in range(len(texts)) if not hit[i]]


def naive_topk(questions, ks):
    """questions: list of (passage_texts, golds). Rescans the prefix for every k."""
    usable = [(ts, [g for g in gs if naive_tokens(g)]) for ts, gs in questions]
    usable = [(ts, gs) for ts, gs in usable if gs]
    out = {}
    for k in ks:
        hits = 0
        for ts, gs in usable:
            if any(naive_contains(t, g) for t in ts[:k] for g in gs):
                hits += 1
        out[k] = hits / len(usable)
    return out


def naive_em(pred, golds):
    return any(" ".join(naive_tokens(pred)) == " ".join(naive_tokens(g)) for g in golds)


def naive_top_n_em(preds_by_q, golds_by_q, n):
    """Over questions with at least one gold that survives normalization."""
    qids = [q for q, gs in golds_by_q.items() if any(naive_tokens(g) for g in gs)]
    hits = sum(1 for q in qids if any(naive_em(p, golds_by_q[q]) for p in preds_by_q.get(q, [])[:n]))
    return hits / len(qids)
