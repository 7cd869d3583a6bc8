"""Which gadget tells two strip widths apart."""
from unitlayers.analysis import distinguish

pairs = [("3/5", "7/10"), (1.3, 2.3), (1.6, 1.7), (2.0, 2.5), ("0.866", "0.867"), ("1/100", "1/99")]
for e1, e2 in pairs:
    w = distinguish(e1, e2)
    where = f"only in width #{w.present_in}"
    if w.kind == "sandwich":
        print(f"{e1!s:>6} vs {e2!s:<6} {w.kind} m_s={w.params['m_s']}  {where}")
    else:
        print(f"{e1!s:>6} vs {e2!s:<6} {w.kind} N={w.params['N']} M={w.params['M']} "
              f"threshold {w.threshold_text}  {where}")
