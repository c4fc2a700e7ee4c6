#include <stdio.h>
#include <string.h>
#define N 64
int tmp[N];
void merge_sort(int *a, int n)
{
    int m = n / 2, i = 0, j = m, k;
    if (n > 1)
    {
        merge_sort(a, m);
        merge_sort(a + m, n - m);
        for (k = 0; k < n; k++)
        {
            tmp[k] = j >= n || i < m && a[i] <= a[j] ? a[i++] : a[j++];
        }
        memcpy(a, tmp, n * sizeof(int));
    }
}
int main(int argc, char *argv[])
{
    int i;
    int data[N];
    for (i = 0; i < N; i++)
    {
        data[i] = (i * 29 + 7) % N;
    }
    merge_sort(data, N);
    for (i = 0; i < N; i++)
    {
        printf("%d\n", data[i]);
    }
    return 0;
}
