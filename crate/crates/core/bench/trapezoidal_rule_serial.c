#include <stdio.h>
double f(double x)
{
    return x * x;
}
int main(int argc, char *argv[])
{
    int i, n = 1048576;
    double a = 0.0, b = 3.0, h, sum;
    h = (b - a) / n;
    sum = (f(a) + f(b)) / 2.0;
    for (i = 1; i < n; i++)
    {
        sum += f(a + i * h);
    }
    sum *= h;
    printf("integral = %.10f\n", sum);
    return 0;
}
