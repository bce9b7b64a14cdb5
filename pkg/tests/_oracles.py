"""Frozen reference values, derived independently of the package.

Every constant is the correctly rounded double of the exact expression in
its comment, evaluated with 50-digit arithmetic (mpmath) or by hand where
elementary. Tests compare package output against these values, never the
other way round.
"""

# hyperbolic building blocks at kappa = 1, T = 1
TANH_1 = 0.7615941559557649        # tanh(1)
COTH_1 = 1.3130352854993312        # cosh(1)/sinh(1)
SECH_1 = 0.6480542736638853        # 1/cosh(1)

# kernel masses of [1/2, 1] seen from t = 0, kappa = 1, T = 1
MASS_U_HALF = 0.44340944198503696  # sinh(1/2)/sinh(1)
MASS_C_HALF = 0.23500371220159449  # (cosh(1/2)-1)/(cosh(1)-1)

# two-level target (1 on [0,1/2), 2 on [1/2,1]), kappa = 1, T = 1, x = 0
TWO_LEVEL_SIGNAL_0 = 1.443409441985037    # 1 + sinh(1/2)/sinh(1)
TWO_LEVEL_SIGNAL_C_0 = 0.434654278518588  # (1 - sech 1)(1 + MASS_C_HALF), terminal 0
TWO_LEVEL_X_HALF = 0.4452100373216985
# ... = 1 - cosh(1/2)/cosh(1) + sinh(1/2) cosh(1/2) (tanh 1 - tanh 1/2)
TWO_LEVEL_COST_U = 0.9088936566782346     # = term1 + term2 below
TWO_LEVEL_COST_U_TERM1 = 0.7933643673632321   # tanh(1)/2 * signal(0)^2
TWO_LEVEL_COST_U_TERM2 = 0.11552928931500243  # 1/2 int (xi - signal)^2 dt
TWO_LEVEL_COST_C = 1.1622229350368765     # constrained analog, terminal 0
TWO_LEVEL_COST_C_TERM1 = 0.12403216355922736
TWO_LEVEL_COST_C_TERM2 = 1.0381907714776493

# polynomial target u^2 on [0, 1], kappa = 1: signal at t = 0
POLY_U2_SIGNAL_0 = 0.2981637435213569  # int_0^1 u^2 cosh(1-u) du / sinh(1)

# singular target sign(u - 1/2)|u - 1/2|^(-1/4) on [0, 1], kappa = 1
FIG2_SIGNAL_0 = -0.1536122241973454    # int xi(u) cosh(1-u) du / sinh(1)
FIG2_SIGNAL_QTR = 0.33078691598038823  # same from t = 1/4
FIG2_SIGNAL_C_0 = -0.25316128257545    # (1 - sech 1) int xi sinh(1-u) du / (cosh 1 - 1)
SINGULAR_SQ_INTEGRAL = 2.8284271247461903  # int_0^1 |u-1/2|^(-1/2) du = 2 sqrt(2)
SINGULAR_HAT_TRACKING = 1.5808802290397617
# ... = 1/2 int (X - xi)^2 du for X piecewise linear 1 -> 0 -> 1 = (1/3 + 2 sqrt 2)/2

# average-price call, sigma = 1, K = 0, S0 = 0, T = 1
ASIAN_SIGNAL_0 = 0.38914763950374076    # hedge signal at t = 0, kappa = 1
ASIAN_SIGNAL_C_0 = 0.15529572512243894  # constrained, terminal position 0
ASIAN_PRICE_ATM_0 = 0.31539156525252    # sqrt(5/8)/sqrt(2 pi)

# non-ATM price anchor: t = 0.2, s = 0.3, K = 0.1, sigma = 0.8, T = 1
PRICE_EARLY_ANCHOR = 0.3231768127947509
# ... = m Phi(m/sd) + sd phi(m/sd), m = 0.2, sd = 0.8 sqrt(0.425)

# reachability integral of W_{T/2}: int d E[W^2] / (T - t) = ln 2
LN_2 = 0.6931471805599453

# discrete two-step problem, kappa = 1, T = 1, x = 0, targets (0, 1):
# J(u0) = (u0/2 - 1)^2/4 + u0^2/4 minimized at u0 = 2/5 with J = 1/5
LQ_N2_RATE_0 = 0.4
LQ_N2_OBJECTIVE = 0.2
