#include <mpi.h>
#include <stdio.h>
#define N 40
int main(int argc, char *argv[])
{
    int rank, size, i, k;
    long a, b, t, local = 0, total = 0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (i = rank; i < N; i += size)
    {
        a = 0;
        b = 1;
        for (k = 0; k < i; k++)
        {
            t = a + b;
            a = b;
            b = t;
        }
        local += a;
    }
    MPI_Reduce(&local, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    MPI_Bcast(&total, 1, MPI_LONG, 0, MPI_COMM_WORLD);
    if (rank == size - 1)
    {
        printf("sum of first %d fibonacci numbers = %ld\n", N, total);
    }
    MPI_Finalize();
    return 0;
}
