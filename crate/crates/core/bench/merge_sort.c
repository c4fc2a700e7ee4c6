#include <mpi.h>
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
    int rank, size, i;
    int data[N], part[N];
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (i = 0; i < N; i++)
    {
        data[i] = (i * 29 + 7) % N;
    }
    MPI_Scatter(data, N / size, MPI_INT, part, N / size, MPI_INT, 0, MPI_COMM_WORLD);
    merge_sort(part, N / size);
    MPI_Gather(part, N / size, MPI_INT, data, N / size, MPI_INT, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        merge_sort(data, N);
        for (i = 0; i < N; i++)
        {
            printf("%d\n", data[i]);
        }
    }
    MPI_Finalize();
    return 0;
}
