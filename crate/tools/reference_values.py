"""Multiprecision reference values frozen into the Rust tests (requires mpmath)."""
from mpmath import mp, mpf, gamma, quad, inf, exp, binomial, log, euler, harmonic, e
mp.dps = 40
print("G3/G2.5", gamma(3)/gamma(2.5))
print("G2/G1.5", gamma(2)/gamma(1.5))
for (m,v) in [(1,2),(2,2),(10,1.5),(30,10),(100,3),(1000,1.1),(10000,2),(5,1.01)]:
    v=mpf(v); print("lgr",m,v, gamma(m+1)/gamma(m+1-1/v))
print("G4/G3.5", gamma(4)/gamma(3.5))
for x in [0.5,1e-3,0.0099,2.5,10.3,171.5]:
    print("lngamma",x, mp.loggamma(x))
# pareto order stat by quadrature
def pareto_os(a,v,m,i):
    a=mpf(a);v=mpf(v)
    F=lambda x:1-(a/x)**v; f=lambda x: v*(a/x)**v/x
    c = mp.factorial(m)/(mp.factorial(i-1)*mp.factorial(m-i))
    return quad(lambda x: x*c*F(x)**(i-1)*(1-F(x))**(m-i)*f(x),[a,2*a,10*a,100*a,inf])
print("pareto os (1,2.5,5,3)", pareto_os(1,2.5,5,3))
print("pareto os (2,3,4,4)", pareto_os(2,3,4,4))
print("pareto os (1,2,2,2)", pareto_os(1,2,2,2))
# exp reserve revenue n=2 r=1
n=2;r=1
F=lambda x:1-exp(-x); f=lambda x: exp(-x)
h = n*r*F(r)**(n-1)*(1-F(r)) + n*(n-1)*quad(lambda x: x*F(x)**(n-2)*f(x)*(1-F(x)),[r,inf])
print("h exp n2 r1", h, "delta", h-mpf(1)/2)
# pareto(1,2) n=2: h(1) and h(2)
def hpar(a,v,n,r):
    a=mpf(a);v=mpf(v)
    F=lambda x:1-(a/x)**v; f=lambda x: v*(a/x)**v/x
    t1 = n*r*F(r)**(n-1)*(1-F(r))
    t2 = n*(n-1)*quad(lambda x: x*F(x)**(n-2)*f(x)*(1-F(x)),[r,10*r,100*r,inf]) if n>=2 else 0
    return t1+t2
print("hpar(1,2,2,1)", hpar(1,2,2,1), "hpar(1,2,2,2)", hpar(1,2,2,2), "loss", hpar(1,2,2,1)-hpar(1,2,2,2))
print("hpar(1,1,3,7)", hpar(1,1,3,7))
print("surplus exp n2", 1-(1-exp(-1))**2, "n1", exp(-1))
# uniform reserve revenue n=3 r=0.5
n=3; r=mpf('0.5')
h= n*r*r**(n-1)*(1-r) + n*(n-1)*quad(lambda x: x*x**(n-2)*(1-x),[r,1])
print("unif h n3 r.5", h)
print("H1e6-ln-g", harmonic(10**6)-log(10**6)-euler)
print("euler", euler)
