#include <stdio.h>
int main(int argc, char *argv[])
{
    int i, n = 20;
    double result = 1.0;
    for (i = 1; i <= n; i++)
    {
        result *= i;
    }
    printf("%d! = %.0f\n", n, result);
    return 0;
}
